// Command-line front end: spectrum scans, classical tables, tunneling
// profiles, steady states, reduced/FPE tiers, parameter sweeps and the
// figure-reproduction presets.
#include "kerrosc/classical.hpp"
#include "kerrosc/fpe.hpp"
#include "kerrosc/liouvillian.hpp"
#include "kerrosc/parallel.hpp"
#include "kerrosc/reduced.hpp"
#include "kerrosc/spectrum.hpp"
#include "kerrosc/sweep.hpp"
#include "kerrosc/table.hpp"
#include "kerrosc/tunneling.hpp"
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

using namespace kerrosc;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    int workers = 0;
    std::string n_max = "auto";
    std::string tiers;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--config", config_path, "JSON experiment configuration");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--workers", workers,
                        "worker threads (default: KERROSC_WORKERS or all cores)");
        cmd->add_option("--nmax", n_max, "Fock truncation (integer or 'auto')");
        cmd->add_option("--tiers", tiers, "comma-separated tiers: quantum,reduced,fpe");
    }

    ExperimentConfig load(const std::string& default_mode) const
    {
        ExperimentConfig cfg;
        if (!config_path.empty())
            cfg = ExperimentConfig::from_json_file(config_path);
        cfg.mode = default_mode;
        if (!out_dir.empty())
            cfg.output_dir = out_dir;
        if (workers > 0)
            cfg.workers = workers;
        if (n_max != "auto" && !n_max.empty())
            cfg.n_max = std::stoi(n_max);
        if (!tiers.empty()) {
            cfg.tiers.clear();
            std::stringstream ss(tiers);
            std::string t;
            while (std::getline(ss, t, ','))
                cfg.tiers.insert(t);
        }
        return cfg;
    }
};

int report(const ExperimentOutcome& out)
{
    for (const auto& f : out.files)
        std::cout << "wrote " << f << "\n";
    for (const auto& e : out.errors)
        std::cerr << "error: " << e << "\n";
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kerrosc: driven Kerr oscillator multiphoton-resonance toolkit"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* c_spectrum = app.add_subcommand("spectrum", "anticrossing scan over detuning");
    auto* c_classical = app.add_subcommand("classical", "phase portrait, orbits, coefficients");
    auto* c_tunneling = app.add_subcommand("tunneling", "tunneling amplitude/rate profile");
    auto* c_steady = app.add_subcommand("steady", "full quantum stationary state");
    auto* c_reduced = app.add_subcommand("reduced", "region-basis master equation tier");
    auto* c_fpe = app.add_subcommand("fpe", "quasienergy Fokker-Planck tier");
    auto* c_sweep = app.add_subcommand("sweep", "multi-tier parameter sweep");
    auto* c_compare = app.add_subcommand("compare", "compare P2 between two tiers of a sweep");
    auto* c_preset = app.add_subcommand("preset", "run a named figure-style experiment");

    for (CLI::App* c : {c_spectrum, c_classical, c_tunneling, c_steady, c_reduced, c_fpe,
                        c_sweep, c_compare, c_preset})
        args.attach(c);

    double m = 12.0, a3 = 0.0, g = 1e-3, fr = 0.4, nth = 3.0;
    for (CLI::App* c : {c_classical, c_steady, c_reduced, c_fpe}) {
        c->add_option("--m", m, "2 delta / alpha");
        c->add_option("--alpha3", a3, "alpha_3 / alpha");
        c->add_option("--gamma", g, "gamma / alpha");
        c->add_option("--f", fr, "drive / f_crit");
        c->add_option("--N", nth, "thermal photons");
    }

    std::string preset_name, cmp_a = "quantum", cmp_b = "fpe", cmp_dir = "out";
    c_preset->add_option("name", preset_name, "fig2|fig3|fig4|fig5|fig6|fig7")->required();
    c_compare->add_option("dir", cmp_dir, "sweep output directory")->required();
    c_compare->add_option("--a", cmp_a, "first tier");
    c_compare->add_option("--b", cmp_b, "second tier");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_spectrum->parsed())
            return report(run_experiment(args.load("spectrum")));
        if (c_sweep->parsed())
            return report(run_experiment(args.load("sweep")));
        if (c_tunneling->parsed())
            return report(run_experiment(args.load("tunneling")));
        if (c_fpe->parsed() && !args.config_path.empty())
            return report(run_experiment(args.load("fpe")));

        if (c_preset->parsed()) {
            ExperimentConfig cfg = ExperimentConfig::preset(preset_name);
            if (args.workers > 0)
                cfg.workers = args.workers;
            if (!args.out_dir.empty() && args.out_dir != "out")
                cfg.output_dir = args.out_dir;
            std::filesystem::create_directories(cfg.output_dir);
            std::ofstream cf(std::filesystem::path(cfg.output_dir) / "config.json");
            cf << cfg.to_json() << "\n";
            return report(run_experiment(cfg));
        }
        if (c_compare->parsed()) {
            TierComparison cmp = compare_tiers(cmp_dir, cmp_a, cmp_b);
            std::cout << "rows " << cmp.rows << "\nmax_rel_dev_P2 " << cmp.max_rel_dev_p2
                      << "\npeak_offset " << cmp.peak_offset << "\nflagged " << cmp.flagged
                      << "\n";
            return 0;
        }

        // single-point subcommands
        ExperimentConfig cfg;
        cfg.workers = args.workers;
        ModelParams p = cfg.resolve(m, a3, g, fr, nth);
        int nm = (args.n_max == "auto") ? p.default_n_max() : std::stoi(args.n_max);
        std::filesystem::path dir(args.out_dir);

        if (c_classical->parsed()) {
            PhasePortrait pp = find_stationary_points(p);
            TableOptions topt;
            topt.workers = resolve_workers(args.workers);
            for (Region r : {Region::r1, Region::r2, Region::r3}) {
                RegionTable tab = tabulate_region(p, pp, r, topt);
                TableWriter tw(std::string("coefficients_region") + region_name(r) + ".tsv");
                tw.meta("two_delta_over_alpha", m);
                tw.meta("eps_sep", pp.eps_sep);
                tw.meta("eps1", pp.eps1);
                tw.meta("eps2", pp.eps2);
                tw.columns({"eps", "T", "K", "D", "mean_intensity"});
                for (std::size_t i = 0; i < tab.eps.size(); i++)
                    tw.row({tab.eps[i], tab.period[i], tab.drift[i], tab.diffusion[i],
                            tab.intensity[i]});
                std::cout << "wrote " << tw.name() << " (hash " << tw.write(dir) << ")\n";
                // one mid-window orbit per region as a sample trajectory table
                double e_mid = tab.eps[tab.eps.size() / 2];
                ClassicalOrbit orb = trace_orbit(p, pp, r, e_mid);
                TableWriter ow(std::string("orbit_region") + region_name(r) + ".tsv");
                ow.meta("eps", e_mid);
                ow.meta("period", orb.period);
                ow.columns({"t", "re_a", "im_a"});
                for (std::size_t i = 0; i < orb.times.size(); i += 4)
                    ow.row({orb.times[i], orb.samples[i].real(), orb.samples[i].imag()});
                std::cout << "wrote " << ow.name() << " (hash " << ow.write(dir) << ")\n";
            }
            return 0;
        }
        if (c_steady->parsed()) {
            SteadyState ss = steady_state(p, nm);
            TableWriter tw("steady.tsv");
            tw.meta("params", p.describe());
            tw.meta("n_max", (double)nm);
            tw.meta("residual", ss.residual);
            tw.columns({"P1", "P2", "P3", "mean_intensity", "boundary_mass", "split_mass"});
            tw.row({ss.occupations.p1, ss.occupations.p2, ss.occupations.p3,
                    ss.mean_intensity, ss.occupations.boundary_mass,
                    ss.occupations.split_mass});
            if (ss.occupations.split_mass > 0.01)
                tw.meta("hybridization_split_note",
                        "more than 1% of probability split between regions 1 and 3");
            std::cout << "wrote steady.tsv (hash " << tw.write(dir) << ")\n";
            std::cout << "P1 " << ss.occupations.p1 << "  P2 " << ss.occupations.p2 << "  P3 "
                      << ss.occupations.p3 << "  <n> " << ss.mean_intensity << "\n";
            return 0;
        }
        if (c_reduced->parsed()) {
            PhasePortrait pp = find_stationary_points(p);
            TableOptions topt;
            topt.workers = resolve_workers(args.workers);
            RegionTable t1 = tabulate_region(p, pp, Region::r1, topt);
            RegionTable t2 = tabulate_region(p, pp, Region::r2, topt);
            RegionTable t3 = tabulate_region(p, pp, Region::r3, topt);
            ReducedModel model = build_reduced_generator(p, pp, t1, t2, t3);
            ReducedSolution sol = reduced_steady_state(model);
            TableWriter lv("reduced_levels.tsv");
            lv.meta("params", p.describe());
            lv.meta("P1", sol.p1);
            lv.meta("P2", sol.p2);
            lv.meta("P3", sol.p3);
            lv.columns({"n", "region", "eps", "population"});
            for (std::size_t i = 0; i < model.levels.size(); i++)
                lv.row({(double)model.levels[i].bohr_n, (double)(int)model.levels[i].region,
                        model.levels[i].eps, sol.populations(i)});
            std::cout << "wrote reduced_levels.tsv (hash " << lv.write(dir) << ")\n";
            TableWriter pw("reduced_pairs.tsv");
            pw.columns({"n", "t", "delta_eps13", "abs_rho13", "current"});
            for (std::size_t q = 0; q < model.pairs.size(); q++)
                pw.row({(double)q, model.pairs[q].t, model.pairs[q].mismatch,
                        std::abs(sol.coherence[q]), sol.pair_current[q]});
            std::cout << "wrote reduced_pairs.tsv (hash " << pw.write(dir) << ")\n";
            std::cout << "P1 " << sol.p1 << "  P2 " << sol.p2 << "  P3 " << sol.p3 << "\n";
            return 0;
        }
        if (c_fpe->parsed()) {
            ExperimentConfig fc;
            fc.mode = "fpe";
            fc.m_grid = {m};
            fc.alpha3 = {a3};
            fc.gamma = {g};
            fc.f_ratio = {fr};
            fc.n_thermal = {nth};
            fc.tiers = {"fpe"};
            fc.output_dir = args.out_dir;
            fc.workers = args.workers;
            return report(run_experiment(fc));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
