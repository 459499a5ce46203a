#ifndef WDVV_CLI_HPP_
#define WDVV_CLI_HPP_

// Command-line front end (see tools/wdvv.cpp). Exit codes: 0 success,
// 1 verification mismatch, 2 malformed input, 3 internal consistency failure.

#include "wdvv/cache_store.hpp"
#include "wdvv/closed_gw.hpp"
#include "wdvv/core_index.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/open_gw.hpp"
#include "wdvv/regression_table.hpp"
#include "wdvv/welschinger.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace wdvv::cli {

enum ExitCode { exit_ok = 0, exit_mismatch = 1, exit_malformed = 2, exit_consistency = 3 };

/// "a", "a..b" (inclusive); an empty result when b < a.
inline std::vector<int> parse_range(const std::string& text)
{
    const auto dots = text.find("..");
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size())
            throw std::invalid_argument("bad range '" + text + "'");
        return v;
    };
    try {
        if (dots == std::string::npos)
            return {num(text)};
        const int lo = num(text.substr(0, dots));
        const int hi = num(text.substr(dots + 2));
        std::vector<int> out;
        for (int v = lo; v <= hi; ++v)
            out.push_back(v);
        return out;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("bad range '" + text + "'");
    }
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the
/// exception of the smallest failing index.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

struct Session {
    MemoStore store;
    std::unique_ptr<ClosedEngine> closed;
    std::unique_ptr<OpenEngine> open;
    std::optional<std::string> cache_path;
    bool cache_writable = false;
    std::size_t loaded_size = 0;

    explicit Session(Integer line_seed = 1)
        : closed(std::make_unique<ClosedEngine>(store, std::move(line_seed))),
          open(std::make_unique<OpenEngine>(store, *closed))
    {
    }

    // Lenient unless strict: a bad cache is reported and left untouched.
    void attach_cache(const std::string& path, bool strict, std::ostream& err)
    {
        cache_path = path;
        try {
            store = load_cache(path);
            cache_writable = true;
        } catch (const std::exception& e) {
            if (strict)
                throw;
            err << "warning: ignoring cache: " << e.what() << "\n";
            cache_writable = false;
        }
        loaded_size = store.size();
    }

    void flush()
    {
        if (cache_path && cache_writable && store.size() != loaded_size) {
            save_cache(store, *cache_path);
            loaded_size = store.size();
        }
    }
};

struct Row {
    RelativeClassIndex key;
    std::optional<int> l;
    Rational gamma;
    std::optional<Integer> welschinger;
    int sign = 1;
};

inline Row compute_row(Session& session, const RelativeClassIndex& key)
{
    Row row{key, interior_points(key), session.open->gamma(key), std::nullopt, 1};
    if (row.l) {
        row.sign = sign_of(key);
        row.welschinger = welschinger_from_gamma(key, row.gamma);
    }
    return row;
}

inline std::string csv_field(const std::string& s)
{
    return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

inline std::string compact(const MultiIndex& m) { return format_multi_index(canonical_multiset(m)); }

inline void write_rows(const std::vector<Row>& rows, const std::string& format, std::ostream& out)
{
    if (format == "json") {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json o;
            o["d"] = r.key.d;
            o["alpha"] = compact(r.key.alpha);
            o["beta"] = compact(r.key.beta);
            o["k"] = r.key.k;
            o["l"] = r.l ? nlohmann::ordered_json(*r.l) : nlohmann::ordered_json(nullptr);
            o["gamma"] = to_string(r.gamma);
            o["welschinger"] = r.welschinger ? nlohmann::ordered_json(to_string(*r.welschinger))
                                             : nlohmann::ordered_json(nullptr);
            o["sign"] = r.sign;
            doc.push_back(std::move(o));
        }
        out << doc.dump(2) << "\n";
        return;
    }
    out << "d,alpha,beta,k,l,gamma,welschinger,sign\n";
    for (const auto& r : rows) {
        out << r.key.d << "," << csv_field(compact(r.key.alpha)) << "," << csv_field(compact(r.key.beta)) << ","
            << r.key.k << "," << (r.l ? std::to_string(*r.l) : "") << "," << to_string(r.gamma) << ","
            << (r.welschinger ? to_string(*r.welschinger) : "") << "," << r.sign << "\n";
    }
}

struct KeyOptions {
    std::optional<int> r, s;
    int d = 0;
    std::string alpha, beta;
    int k = 0;

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--r", r, "number of real blowup points (default: length of --alpha)");
        cmd->add_option("--s", s, "number of conjugate pairs (default: length of --beta)");
        cmd->add_option("--d", d, "degree")->required();
        cmd->add_option("--alpha", alpha, "real multiplicities, e.g. 2^8 or 3,2,2");
        cmd->add_option("--beta", beta, "conjugate-pair multiplicities");
        cmd->add_option("--k", k, "boundary points")->check(CLI::NonNegativeNumber);
    }

    RelativeClassIndex key() const
    {
        RelativeClassIndex c{d, parse_multi_index(alpha), parse_multi_index(beta), k};
        if (r && static_cast<int>(c.alpha.size()) != *r)
            throw std::invalid_argument("--alpha has " + std::to_string(c.alpha.size()) + " entries, --r is " +
                                        std::to_string(*r));
        if (s && static_cast<int>(c.beta.size()) != *s)
            throw std::invalid_argument("--beta has " + std::to_string(c.beta.size()) + " entries, --s is " +
                                        std::to_string(*s));
        return c;
    }
};

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Open Gromov-Witten and Welschinger invariants of blowups of the projective plane"};
    app.require_subcommand(1);
    std::string cache;
    unsigned threads = 1;
    bool strict_cache = false;
    app.add_option("--cache", cache, "persistent memo file");
    app.add_option("--threads", threads, "worker threads for tables and verify (0 = all cores)");
    app.add_flag("--strict-cache", strict_cache, "fail on an unreadable cache instead of ignoring it");

    auto* inv = app.add_subcommand("invariant", "one Gamma and/or Welschinger count");
    KeyOptions inv_key;
    inv_key.add_to(inv);
    std::string mode = "gamma";
    bool trace = false;
    inv->add_option("--mode", mode, "gamma, welschinger or both")
        ->check(CLI::IsMember({"gamma", "welschinger", "both"}));
    inv->add_flag("--trace", trace, "also print mu, l, the relation used and the recursion depth");

    auto* table = app.add_subcommand("table", "a range of invariants as CSV or JSON");
    std::string t_d, t_k, t_l, format = "csv";
    std::vector<std::string> t_alpha, t_beta;
    table->add_option("--d", t_d, "degree or range a..b")->required();
    table->add_option("--alpha", t_alpha, "alpha pattern (repeatable)");
    table->add_option("--beta", t_beta, "beta pattern (repeatable)");
    auto* k_opt = table->add_option("--k", t_k, "boundary points, value or range");
    table->add_option("--l", t_l, "interior points, value or range")->excludes(k_opt);
    table->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* verify = app.add_subcommand("verify", "recompute the built-in regression values");
    std::optional<std::string> corrupt_seed;
    verify->add_option("--corrupt-line-seed", corrupt_seed, "test hook")->group("");

    auto* convert = app.add_subcommand("convert", "Gamma <-> Welschinger for one key");
    KeyOptions conv_key;
    conv_key.add_to(convert);
    std::optional<std::string> from_gamma, from_w;
    auto* g_opt = convert->add_option("--gamma", from_gamma, "Gamma value p or p/q");
    convert->add_option("--welschinger", from_w, "Welschinger count")->excludes(g_opt);

    auto* cache_cmd = app.add_subcommand("cache", "inspect or clear the cache file");
    cache_cmd->require_subcommand(1);
    auto* stats = cache_cmd->add_subcommand("stats", "record counts");
    auto* clear = cache_cmd->add_subcommand("clear", "drop all records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_malformed;
    }

    try {
        if (*cache_cmd) {
            if (cache.empty()) {
                err << "error: cache commands need --cache PATH\n";
                return exit_malformed;
            }
            if (*clear) {
                save_cache(MemoStore{}, cache);
                out << "cleared " << cache << "\n";
                return exit_ok;
            }
            if (*stats) {
                const MemoStore s = load_cache(cache);
                out << "file=" << cache << "\nopen=" << s.open.size() << "\nclosed=" << s.closed.size() << "\n";
                return exit_ok;
            }
        }

        // A corrupted seed must not touch the cache.
        Integer seed = 1;
        if (*verify && corrupt_seed)
            seed = Integer(*corrupt_seed);
        Session session(seed);
        if (!cache.empty() && !(*verify && corrupt_seed))
            session.attach_cache(cache, strict_cache, err);

        int status = exit_ok;
        if (*inv) {
            const RelativeClassIndex key = inv_key.key();
            const GammaTrace tr = session.open->gamma_traced(key);
            const auto l = interior_points(key);
            if (mode != "gamma" && !l) {
                err << "error: " << to_string(key) << " has no interior-point count, so no Welschinger count\n";
                return exit_malformed;
            }
            if (mode == "gamma") {
                out << to_string(tr.value) << "\n";
            } else if (mode == "welschinger") {
                out << to_string(welschinger_from_gamma(key, tr.value)) << "\n";
            } else {
                out << "gamma=" << to_string(tr.value) << "\nwelschinger=" << to_string(welschinger_from_gamma(key, tr.value))
                    << "\nsign=" << sign_of(key) << "\n";
            }
            if (trace) {
                out << "mu=" << maslov_index(key) << "\nl=" << (l ? std::to_string(*l) : "undefined")
                    << "\nrelation=" << (tr.relation ? to_string(*tr.relation) : "none") << "\ndepth=" << tr.depth
                    << "\n";
            }
        } else if (*table) {
            std::vector<RelativeClassIndex> keys;
            if (t_alpha.empty())
                t_alpha.push_back("");
            if (t_beta.empty())
                t_beta.push_back("");
            for (int d : parse_range(t_d))
                for (const auto& a : t_alpha)
                    for (const auto& b : t_beta) {
                        RelativeClassIndex base{d, parse_multi_index(a), parse_multi_index(b), 0};
                        const int mu = maslov_index(base);
                        std::vector<int> ks;
                        if (!t_k.empty()) {
                            ks = parse_range(t_k);
                        } else if (!t_l.empty()) {
                            for (int l : parse_range(t_l))
                                if (mu - 1 - 2 * l >= 0)
                                    ks.push_back(mu - 1 - 2 * l);
                            std::sort(ks.begin(), ks.end());
                        } else {
                            for (int k = 0; k <= mu - 1; ++k)
                                if (interior_points(mu, k))
                                    ks.push_back(k);
                        }
                        for (int k : ks) {
                            if (k < 0)
                                throw std::invalid_argument("negative k in range");
                            base.k = k;
                            keys.push_back(base);
                        }
                    }
            std::vector<Row> rows(keys.size());
            parallel_for(keys.size(), threads, [&](std::size_t i) { rows[i] = compute_row(session, keys[i]); });
            write_rows(rows, format, out);
        } else if (*verify) {
            struct Check {
                std::string label;
                std::function<std::string()> got;
                std::string expected;
                std::string note;
            };
            std::vector<Check> checks;
            for (const auto& row : regression_table()) {
                const CanonicalKey key = row.key();
                checks.push_back({to_string(key) + " (table " + std::to_string(row.table) + ")",
                                  [&session, key] { return to_string(session.open->gamma(key)); }, row.expected,
                                  row.printed ? " (also printed as " + *row.printed + ")" : ""});
            }
            // The five initial families and the degree-one value from relation 5a,
            // each checked for Gamma and for W = 1.
            const std::vector<std::pair<RelativeClassIndex, std::string>> base = {
                {{0, {-1}, {}, 0}, "2"}, {{1, {}, {}, 2}, "2"},     {{1, {}, {}, 0}, "1"},
                {{1, {1}, {}, 1}, "2"},  {{1, {}, {1}, 0}, "2"},    {{1, {1, 1}, {}, 0}, "-2"},
            };
            for (const auto& [key, value] : base) {
                checks.push_back({to_string(canonicalize(key)), [&session, key] {
                                      return to_string(session.open->gamma(key));
                                  },
                                  value, ""});
                checks.push_back({"W " + to_string(canonicalize(key)), [&session, key] {
                                      return to_string(welschinger_from_gamma(key, session.open->gamma(key)));
                                  },
                                  "1", ""});
            }
            std::vector<std::string> got(checks.size());
            parallel_for(checks.size(), threads, [&](std::size_t i) {
                try {
                    got[i] = checks[i].got();
                } catch (const consistency_error& e) {
                    got[i] = std::string("error: ") + e.what();
                }
            });
            std::size_t failures = 0;
            std::optional<std::string> first;
            for (std::size_t i = 0; i < checks.size(); ++i) {
                const bool ok = got[i] == checks[i].expected;
                if (!ok) {
                    ++failures;
                    if (!first)
                        first = checks[i].label;
                }
                out << (ok ? "ok   " : "FAIL ") << checks[i].label << " = " << got[i];
                if (!ok)
                    out << " expected " << checks[i].expected;
                out << checks[i].note << "\n";
            }
            out << "verify: " << checks.size() << " checks, " << failures << " failures\n";
            if (first)
                out << "first failure: " << *first << "\n";
            status = failures ? exit_mismatch : exit_ok;
        } else if (*convert) {
            const RelativeClassIndex key = conv_key.key();
            if (from_gamma)
                out << to_string(welschinger_from_gamma(key, parse_rational(*from_gamma))) << "\n";
            else if (from_w)
                out << to_string(gamma_from_welschinger(key, Integer(*from_w))) << "\n";
            else
                throw std::invalid_argument("convert needs --gamma or --welschinger");
        }
        session.flush();
        return status;
    } catch (const consistency_error& e) {
        err << "internal consistency failure: " << e.what() << "\n";
        return exit_consistency;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_malformed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_malformed;
    }
}

}  // namespace wdvv::cli

#endif  // WDVV_CLI_HPP_
