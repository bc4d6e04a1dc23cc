#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "fadingld/fadingld.hpp"

using namespace fadingld;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ModelError("cannot write " + path);
    return f;
}

std::array<double, 4> four(const std::string& text, const char* what) {
    auto v = IniDocument::parse_list(text, what);
    if (v.size() != 4) throw ParameterError(std::string(what) + " needs four comma-separated values");
    return {v[0], v[1], v[2], v[3]};
}

void write_oracle_csv(std::ostream& os, const RadialProblem& p, const OracleSearch& s) {
    full_precision(os);
    os << "# alpha_min=" << s.alpha << ", beta=" << s.result.multipliers.at(0) << ", delta=" << s.result.multipliers.at(1)
       << ", entropy=" << s.result.entropy << "\n";
    os << "# max_residual=" << s.result.max_residual << ", pieces=" << s.grid.pieces.size() << "\n";
    os << "s,u,density\n";
    for (std::size_t i = 0; i < s.grid.pieces.size(); ++i) {
        const auto& pc = s.grid.pieces[i];
        os << pc.s << ',' << pc.u << ',' << s.result.ratio[i] * p.q(pc.s) * p.fading.pdf(pc.u) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frustration events in dense networks with random fadings"};
    app.require_subcommand(1);
    std::string scenario, out;

    auto* sample = app.add_subcommand("sample", "draw one marked Poisson configuration");
    double lambda = 50.0;
    std::uint64_t seed = 1;
    sample->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    sample->add_option("--lambda", lambda)->required();
    sample->add_option("--seed", seed)->required();
    sample->add_option("--out", out)->required();

    auto* curve = app.add_subcommand("curve", "a-priori frustrated fraction p(c)");
    std::string mode = "up-dir";
    double cmin = 0.0, cmax = 1.0;
    int points = 101;
    curve->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    curve->add_option("--mode", mode);
    curve->add_option("--cmin", cmin)->required();
    curve->add_option("--cmax", cmax)->required();
    curve->add_option("--points", points)->required()->check(CLI::PositiveNumber);
    curve->add_option("--out", out)->required();

    auto* mc = app.add_subcommand("mc", "rare-event Monte Carlo");
    McConfig cfg;
    std::string mc_mode = "up-dir";
    mc->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    mc->add_option("--lambda", cfg.lambda)->required();
    mc->add_option("--samples", cfg.samples)->required();
    mc->add_option("--c", cfg.c)->required();
    mc->add_option("--bfrac", cfg.b)->required();
    mc->add_option("--mode", mc_mode);
    mc->add_option("--seed", cfg.seed)->required();
    mc->add_option("--threads", cfg.threads);
    mc->add_option("--count-threshold", cfg.count_threshold);
    mc->add_flag("--absolute", cfg.absolute, "compare G(L)(W) with b instead of the frustrated fraction");
    mc->add_option("--out", out)->required();

    auto* mini = app.add_subcommand("minimize", "relative-entropy minimizer");
    double c = 1.0, b = 0.0;
    std::string kind;
    mini->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    mini->add_option("--c", c)->required();
    mini->add_option("--b", b)->required();
    mini->add_option("--kind", kind)->required()->check(CLI::IsMember({"updir", "b0", "plfree-dodir", "oracle"}));
    mini->add_option("--out", out)->required();

    auto* cls = app.add_subcommand("classify", "exponential or sub-exponential decay");
    std::string bs, cs;
    cls->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
    cls->add_option("--b", bs)->required();
    cls->add_option("--c", cs)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Scenario sc = load_scenario(scenario);
        const NetworkModel& model = sc.model;
        if (*sample) {
            Sample s = sample_ppp(model, lambda, seed);
            auto f = open_out(out);
            write_sample_csv(f, s);
            std::cerr << s.count() << " users\n";
        } else if (*curve) {
            if (points < 2 && cmin != cmax) throw ParameterError("need at least two points");
            std::vector<double> grid;
            for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? cmin : cmin + (cmax - cmin) * i / (points - 1));
            auto f = open_out(out);
            write_curve_csv(f, frustration_curve(model, parse_mode(mode), grid));
        } else if (*mc) {
            cfg.mode = parse_mode(mc_mode);
            ExperimentReport r = rare_event_mc(model, cfg, sc.canonical_text);
            auto f = open_out(out);
            write_report_csv(f, r);
            std::cerr << r.hits << " hits in " << r.samples << " samples, " << r.wall_seconds << " s\n";
        } else if (*mini) {
            auto f = open_out(out);
            if (kind == "plfree-dodir") {
                MinimizerSolution sol = minimize_pathloss_free_downlink(model, b, c);
                write_solution_csv(f, sol, model.window().max_radius(), model.fmin(), model.fmax());
            } else {
                RadialProblem p = RadialProblem::from_model(model, c, b);
                if (kind == "oracle") {
                    write_oracle_csv(f, p, oracle_minimize_direct_uplink(p));
                } else {
                    MinimizerSolution sol = kind == "b0" ? minimize_b0(p) : minimize_direct_uplink(p);
                    write_solution_csv(f, sol, p.r, model.fmin(), model.fmax());
                }
            }
        } else if (*cls) {
            auto bv = four(bs, "--b"), cv = four(cs, "--c");
            DecayVerdict v = model.base().is_random() ? classify_random_base(model, bv, cv) : classify_fixed(model, bv, cv);
            std::cout << v.record() << "\n";
            for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
