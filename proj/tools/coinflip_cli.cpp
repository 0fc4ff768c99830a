// coinflip: command-line front end for the coin-flipping library.
//
// Subcommands: check, synthesize, analyze, sweep, simulate.
// Exit codes: 0 success/feasible, 1 usage/parse/internal error, 2 infeasible.
//
// Arithmetic mode: --mode rational|float wins; otherwise any "a/b" spec
// argument selects rational; otherwise the CF_MODE environment variable;
// otherwise rational.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <coinflip/coinflip.hpp>

using namespace coinflip;

namespace {

enum class Mode { rational, floating };

std::optional<Mode> mode_from_string(const std::string& s) {
    if (s == "rational") return Mode::rational;
    if (s == "float") return Mode::floating;
    return std::nullopt;
}

Mode resolve_mode(const std::string& flag, bool spec_has_ratio) {
    if (!flag.empty()) {
        auto m = mode_from_string(flag);
        if (!m) throw ParseError("unknown mode '" + flag + "' (expected rational or float)");
        return *m;
    }
    if (spec_has_ratio) return Mode::rational;
    if (const char* env = std::getenv("CF_MODE")) {
        auto m = mode_from_string(env);
        if (!m)
            throw ParseError(std::string("CF_MODE='") + env +
                             "' is not a mode (expected rational or float)");
        return *m;
    }
    return Mode::rational;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

bool has_ratio_token(const std::vector<std::string>& tokens) {
    return std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
        return t.find('/') != std::string::npos;
    });
}

template <typename R>
CoinFlipSpec<R> parse_spec_tokens(const std::vector<std::string>& tokens) {
    if (tokens.size() != 6)
        throw ParseError("--spec needs six comma-separated values "
                         "(p00,p11,p0s,p1s,ps0,ps1), got " +
                         std::to_string(tokens.size()));
    R v[6];
    for (std::size_t i = 0; i < 6; ++i) v[i] = arith<R>::parse(tokens[i]);
    return make_spec<R>(v[0], v[1], v[2], v[3], v[4], v[5]);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

template <typename R>
int run_check(const std::vector<std::string>& spec_tokens, Setting setting) {
    CoinFlipSpec<R> spec = parse_spec_tokens<R>(spec_tokens);
    FeasibilityVerdict<R> v =
        setting == Setting::classical ? classical_feasible<R>(spec) : quantum_feasible<R>(spec);
    Json out = verdict_to_json<R>(v);
    out["setting"] = to_string(setting);
    std::cout << out.dump(2) << "\n";
    return v.feasible ? 0 : 2;
}

template <typename R>
int run_synthesize(const std::vector<std::string>& spec_tokens, Setting setting,
                   const std::string& out_path) {
    CoinFlipSpec<R> spec = parse_spec_tokens<R>(spec_tokens);
    ProtocolTree<R> tree = synthesize<R>(spec, setting);
    write_file(out_path, tree_to_string<R>(tree) + "\n");
    AnalysisResult<R> res = analyze<R>(tree);
    Json out;
    out["tree"] = out_path;
    out["nodes"] = count_nodes<R>(tree);
    out["wcf_nodes"] = count_wcf_nodes<R>(tree);
    out["analysis"] = result_to_json<R>(res);
    std::cout << out.dump(2) << "\n";
    return 0;
}

template <typename R>
int run_analyze(const std::string& tree_path, bool oracle, std::uint64_t limit) {
    ProtocolTree<R> tree = parse_tree<R>(read_file(tree_path));
    AnalysisResult<R> res = analyze<R>(tree);
    std::cout << result_to_json<R>(res).dump(2) << "\n";
    if (!oracle) return 0;
    AnalysisResult<R> bf = brute_force_analyze<R>(tree, limit);
    auto exact = [](const Prob<R>& a, const Prob<R>& b) { return a.value() == b.value(); };
    auto close = [](const Prob<R>& a, const Prob<R>& b) {
        return approx_eq<R>(a.value(), b.value());
    };
    bool all_exact = exact(res.p00, bf.p00) && exact(res.p11, bf.p11) &&
                     exact(res.force_a0, bf.force_a0) && exact(res.force_a1, bf.force_a1) &&
                     exact(res.force_b0, bf.force_b0) && exact(res.force_b1, bf.force_b1);
    if (all_exact) {
        std::cout << "oracle: exact match\n";
        return 0;
    }
    bool all_close = close(res.p00, bf.p00) && close(res.p11, bf.p11) &&
                     close(res.force_a0, bf.force_a0) && close(res.force_a1, bf.force_a1) &&
                     close(res.force_b0, bf.force_b0) && close(res.force_b1, bf.force_b1);
    if (all_close) {
        std::cout << "oracle: match within tolerance\n";
        return 0;
    }
    std::cout << "oracle: mismatch\n";
    std::cout << "brute force: " << result_to_json<R>(bf).dump(2) << "\n";
    return 1;
}

// Grid 0, step, 2*step, ... plus an exact final row at hi.
std::vector<double> sweep_grid(double step, double hi) {
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double a = i * step;
        if (a >= hi - 1e-12) break;
        grid.push_back(a);
    }
    grid.push_back(hi);
    return grid;
}

int run_sweep(int figure, double step, const std::string& out_path,
              const std::string& params_csv) {
    if (!(step > 0.0) || step > 0.5) throw ParseError("--step must be in (0, 0.5]");
    std::ostringstream csv;
    const auto& D = [](double v) { return arith<double>::str(v); };
    if (figure == 2) {
        if (!params_csv.empty()) throw ParseError("--params applies to --figure 1 only");
        csv << "a,definitional,quantum,classical\n";
        for (double a : sweep_grid(step, 1.0)) {
            csv << D(a) << "," << D(symmetric_tradeoff(a, Curve::definitional)) << ","
                << D(symmetric_tradeoff(a, Curve::quantum)) << ","
                << D(symmetric_tradeoff(a, Curve::classical)) << "\n";
        }
    } else if (figure == 1) {
        double p0s = 0.75, p1s = 0.75, ps0 = 0.75, ps1 = 0.75;
        if (!params_csv.empty()) {
            auto tokens = split_csv(params_csv);
            if (tokens.size() != 4)
                throw ParseError("--params needs four comma-separated values "
                                 "(p0s,p1s,ps0,ps1)");
            p0s = arith<double>::parse(tokens[0]);
            p1s = arith<double>::parse(tokens[1]);
            ps0 = arith<double>::parse(tokens[2]);
            ps1 = arith<double>::parse(tokens[3]);
        }
        const double cap0 = p0s * ps0;
        const double cap1 = p1s * ps1;
        const double rhs = classical_bound_rhs<double>(p0s, p1s, ps0, ps1);
        const double defined_cap = std::min(p1s, ps1);
        csv << "p00,classical_max_p11,quantum_max_p11,defined_max_p11\n";
        for (double p00 : sweep_grid(step, cap0)) {
            csv << D(p00) << "," << D(std::min(cap1, rhs - p00)) << ","
                << D(std::min(cap1, 1.0 - p00)) << ","
                << D(std::min(defined_cap, 1.0 - p00)) << "\n";
        }
    } else {
        throw ParseError("--figure must be 1 or 2");
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    return 0;
}

template <typename R>
int run_simulate(const std::string& tree_path, std::uint64_t trials, std::uint64_t seed,
                 const std::string& script_path) {
    if (trials == 0) throw ParseError("--trials must be at least 1");
    ProtocolTree<R> tree = parse_tree<R>(read_file(tree_path));
    EmpiricalDistribution d;
    std::optional<AdversaryScript<R>> script;
    if (!script_path.empty()) script = parse_script<R>(read_file(script_path));
    if (script)
        d = run_adversarial<R>(tree, *script, trials, seed);
    else
        d = estimate_honest<R>(tree, trials, seed);
    Json out = empirical_to_json(d);
    // For trees the analyzer handles instantly, print the exact reference:
    // honest rates with binomial sigmas, or the scripted party's forcing caps.
    if (count_nodes<R>(tree) <= 20000) {
        AnalysisResult<R> res = analyze<R>(tree);
        Json ref;
        if (!script) {
            const double n = static_cast<double>(trials);
            auto sigma = [&](const Prob<R>& p) {
                double v = arith<R>::to_double(p.value());
                return std::sqrt(v * (1.0 - v) / n);
            };
            ref["zero"] = arith<R>::to_double(res.p00.value());
            ref["one"] = arith<R>::to_double(res.p11.value());
            ref["abort"] = arith<R>::to_double(res.abort.value());
            Json sig;
            sig["zero"] = sigma(res.p00);
            sig["one"] = sigma(res.p11);
            sig["abort"] = sigma(res.abort);
            ref["sigma"] = std::move(sig);
        } else {
            bool alice = script->party == Party::alice;
            ref["party"] = to_string(script->party);
            ref["max_zero"] =
                arith<R>::to_double((alice ? res.force_a0 : res.force_b0).value());
            ref["max_one"] =
                arith<R>::to_double((alice ? res.force_a1 : res.force_b1).value());
        }
        out["reference"] = std::move(ref);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-party coin-flipping workbench: feasibility checks, protocol synthesis, "
                 "exact cheating analysis, simulation, and trade-off curves."};
    app.require_subcommand(1);

    std::string spec_csv, setting_str = "classical", mode_str, out_path, tree_path;
    std::string script_path, params_csv;
    bool oracle = false;
    int figure = 2;
    double step = 0.01;
    std::uint64_t trials = 0, seed = 0, limit = 100000;

    auto add_mode = [&](CLI::App* sub) {
        sub->add_option("--mode", mode_str, "Arithmetic mode")
            ->check(CLI::IsMember({"rational", "float"}));
    };

    CLI::App* check = app.add_subcommand("check", "Decide feasibility of a coin-flip spec");
    check->add_option("--spec", spec_csv, "p00,p11,p0s,p1s,ps0,ps1")->required();
    check->add_option("--setting", setting_str, "classical or quantum")
        ->required()
        ->check(CLI::IsMember({"classical", "quantum"}));
    add_mode(check);

    CLI::App* synth = app.add_subcommand("synthesize", "Build an optimal protocol tree");
    synth->add_option("--spec", spec_csv, "p00,p11,p0s,p1s,ps0,ps1")->required();
    synth->add_option("--setting", setting_str, "classical or quantum")
        ->required()
        ->check(CLI::IsMember({"classical", "quantum"}));
    synth->add_option("--out", out_path, "Output tree file (cf-tree/1 JSON)")->required();
    add_mode(synth);

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Exact cheating analysis of a tree");
    analyze_cmd->add_option("tree", tree_path, "cf-tree/1 JSON file")->required();
    analyze_cmd->add_flag("--oracle", oracle, "Cross-check against brute-force enumeration");
    analyze_cmd->add_option("--limit", limit, "Brute-force strategy budget");
    add_mode(analyze_cmd);

    CLI::App* sweep = app.add_subcommand("sweep", "Emit trade-off curve CSV");
    sweep->add_option("--figure", figure, "1 = p00/p11 region slices, 2 = symmetric curves")
        ->required();
    sweep->add_option("--step", step, "Grid step, in (0, 0.5]");
    sweep->add_option("--out", out_path, "Output CSV file (default stdout)");
    sweep->add_option("--params", params_csv, "Figure 1 caps p0s,p1s,ps0,ps1 (default 3/4 each)");

    CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo runs of a tree");
    sim->add_option("tree", tree_path, "cf-tree/1 JSON file")->required();
    sim->add_option("--trials", trials, "Number of runs (>= 1)")->required();
    sim->add_option("--seed", seed, "Master seed");
    sim->add_option("--script", script_path, "Adversary script JSON");
    add_mode(sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*check || *synth) {
            Setting setting = setting_from_string(setting_str);
            auto tokens = split_csv(spec_csv);
            Mode mode = resolve_mode(mode_str, has_ratio_token(tokens));
            if (*check)
                return mode == Mode::rational ? run_check<mpq_class>(tokens, setting)
                                              : run_check<double>(tokens, setting);
            return mode == Mode::rational
                       ? run_synthesize<mpq_class>(tokens, setting, out_path)
                       : run_synthesize<double>(tokens, setting, out_path);
        }
        if (*analyze_cmd) {
            Mode mode = resolve_mode(mode_str, false);
            return mode == Mode::rational ? run_analyze<mpq_class>(tree_path, oracle, limit)
                                          : run_analyze<double>(tree_path, oracle, limit);
        }
        if (*sweep) return run_sweep(figure, step, out_path, params_csv);
        if (*sim) {
            Mode mode = resolve_mode(mode_str, false);
            return mode == Mode::rational
                       ? run_simulate<mpq_class>(tree_path, trials, seed, script_path)
                       : run_simulate<double>(tree_path, trials, seed, script_path);
        }
        return 1;
    } catch (const InfeasibleSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
