#include "kerrosc/sweep.hpp"
#include "kerrosc/classical.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/fpe.hpp"
#include "kerrosc/liouvillian.hpp"
#include "kerrosc/parallel.hpp"
#include "kerrosc/reduced.hpp"
#include "kerrosc/spectrum.hpp"
#include "kerrosc/table.hpp"
#include "kerrosc/tunneling.hpp"
#include <json.hpp>
#include <cstdio>
#include <memory>
#include <mutex>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kerrosc {

using nlohmann::json;

namespace {

std::string compact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             double min_prominence)
{
    std::vector<Peak> peaks;
    const std::size_t n = y.size();
    for (std::size_t i = 1; i + 1 < n; i++) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]))
            continue;
        // valleys to the nearest higher ground on each side
        double left_min = y[i], right_min = y[i];
        for (std::size_t j = i; j-- > 0;) {
            left_min = std::min(left_min, y[j]);
            if (y[j] > y[i])
                break;
        }
        for (std::size_t j = i + 1; j < n; j++) {
            right_min = std::min(right_min, y[j]);
            if (y[j] > y[i])
                break;
        }
        Peak p;
        p.prominence = y[i] - std::max(left_min, right_min);
        if (p.prominence < min_prominence)
            continue;
        p.index = (int)i;
        p.x = math::parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]);
        p.x = std::clamp(p.x, x[i - 1], x[i + 1]);
        p.y = y[i];
        peaks.push_back(p);
    }
    return peaks;
}

namespace {

std::vector<double> parse_grid(const json& j)
{
    std::vector<double> out;
    if (j.is_number()) {
        out.push_back(j.get<double>());
    } else if (j.is_array()) {
        for (const auto& v : j)
            out.push_back(v.get<double>());
    } else if (j.is_object()) {
        double start = j.at("start").get<double>();
        double stop = j.at("stop").get<double>();
        int count = j.at("count").get<int>();
        if (count < 1)
            throw Error("grid count must be >= 1");
        for (int i = 0; i < count; i++)
            out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1.0));
    } else {
        throw Error("grid must be a number, array, or {start, stop, count}");
    }
    if (out.empty())
        throw Error("empty grid");
    return out;
}

json grid_to_json(const std::vector<double>& g)
{
    if (g.size() == 1)
        return g[0];
    return json(g);
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text)
{
    json j = json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("mode"))
        cfg.mode = j["mode"].get<std::string>();
    if (j.contains("model")) {
        const json& m = j["model"];
        if (m.contains("two_delta_over_alpha"))
            cfg.m_grid = parse_grid(m["two_delta_over_alpha"]);
        if (m.contains("alpha3_over_alpha"))
            cfg.alpha3 = parse_grid(m["alpha3_over_alpha"]);
        if (m.contains("gamma_over_alpha"))
            cfg.gamma = parse_grid(m["gamma_over_alpha"]);
        if (m.contains("f_over_fcrit"))
            cfg.f_ratio = parse_grid(m["f_over_fcrit"]);
        if (m.contains("n_thermal"))
            cfg.n_thermal = parse_grid(m["n_thermal"]);
    }
    if (j.contains("tiers")) {
        cfg.tiers.clear();
        for (const auto& t : j["tiers"])
            cfg.tiers.insert(t.get<std::string>());
    }
    if (j.contains("n_max")) {
        if (j["n_max"].is_string())
            cfg.n_max = 0;  // "auto"
        else
            cfg.n_max = j["n_max"].get<int>();
    }
    if (j.contains("workers"))
        cfg.workers = j["workers"].get<int>();
    if (j.contains("output_dir"))
        cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("tunnel_prefactor"))
        cfg.tunnel_prefactor = j["tunnel_prefactor"].get<double>();
    if (j.contains("emit_svg"))
        cfg.emit_svg = j["emit_svg"].get<bool>();
    if (j.contains("note"))
        cfg.note = j["note"].get<std::string>();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::to_json() const
{
    json j;
    j["mode"] = mode;
    j["model"]["two_delta_over_alpha"] = grid_to_json(m_grid);
    j["model"]["alpha3_over_alpha"] = grid_to_json(alpha3);
    j["model"]["gamma_over_alpha"] = grid_to_json(gamma);
    j["model"]["f_over_fcrit"] = grid_to_json(f_ratio);
    j["model"]["n_thermal"] = grid_to_json(n_thermal);
    j["tiers"] = tiers;
    j["n_max"] = n_max ? json(n_max) : json("auto");
    j["workers"] = workers;
    j["output_dir"] = output_dir;
    j["tunnel_prefactor"] = tunnel_prefactor;
    j["emit_svg"] = emit_svg;
    if (!note.empty())
        j["note"] = note;
    return j.dump(2);
}

void ExperimentConfig::validate() const
{
    if (mode != "sweep" && mode != "spectrum" && mode != "tunneling" && mode != "fpe")
        throw Error("unknown mode: " + mode);
    if (tiers.empty() && mode == "sweep")
        throw Error("at least one tier must be selected");
    for (const auto& t : tiers)
        if (t != "quantum" && t != "reduced" && t != "fpe")
            throw Error("unknown tier: " + t);
    for (const auto* g : {&m_grid, &alpha3, &gamma, &f_ratio, &n_thermal})
        if (g->empty())
            throw Error("empty model grid");
}

ModelParams ExperimentConfig::resolve(double m, double a3, double g, double fr,
                                      double nth) const
{
    ModelParams p;
    p.alpha = 1.0;
    p.delta = 0.5 * m;
    if (a3 != 0)
        p.alpha_q[3] = a3;
    p.gamma = g;
    p.n_thermal = nth;
    p.drive = fr * p.f_crit();
    return p;
}

ExperimentConfig ExperimentConfig::preset(const std::string& name)
{
    ExperimentConfig cfg;
    if (name == "fig2") {
        cfg.mode = "spectrum";
        cfg.m_grid = parse_grid(json{{"start", 9.75}, {"stop", 10.25}, {"count", 161}});
        cfg.alpha3 = {0.0, 0.005};
        cfg.f_ratio = {0.1};
        cfg.gamma = {0.0};
        cfg.n_thermal = {0.0};
        cfg.tiers = {};
    } else if (name == "fig3") {
        cfg.mode = "tunneling";
        cfg.m_grid = {20.0001, 20.001, 20.004};  // resonance offsets delta_Delta
        cfg.alpha3 = {1e-5};
        cfg.f_ratio = {0.2};
        cfg.gamma = {1e-3};
        cfg.n_thermal = {0.5};
        cfg.tiers = {};
    } else if (name == "fig4") {
        cfg.mode = "fpe";
        cfg.m_grid = {20.0072};
        cfg.alpha3 = {1e-5};
        cfg.f_ratio = {0.2};
        cfg.gamma = {5e-3};
        cfg.n_thermal = {0.5};  // alpha Q / (delta gamma) = (N + 1/2)/(delta/alpha) = 0.1
        cfg.tiers = {"fpe"};
    } else if (name == "fig5") {
        cfg.mode = "sweep";
        cfg.m_grid = parse_grid(json{{"start", 11.94}, {"stop", 12.06}, {"count", 121}});
        cfg.alpha3 = {1e-4};
        cfg.f_ratio = {0.4};
        cfg.gamma = {2e-3};
        cfg.n_thermal = {3.0};
        cfg.tiers = {"quantum"};
        cfg.note = "sixth-order coefficient read as alpha3/alpha = 1e-4; the "
                   "alpha3/alpha^2 reading coincides in units of alpha = 1";
    } else if (name == "fig6") {
        cfg.mode = "sweep";
        cfg.m_grid = parse_grid(json{{"start", 11.97}, {"stop", 12.05}, {"count", 161}});
        cfg.alpha3 = {0.0, 1e-5, 2e-5, 5e-5};
        cfg.f_ratio = {0.4};
        cfg.gamma = {5e-4};
        cfg.n_thermal = {3.0};
        cfg.tiers = {"quantum"};
    } else if (name == "fig7") {
        cfg.mode = "sweep";
        cfg.m_grid = parse_grid(json{{"start", 11.97}, {"stop", 12.05}, {"count", 121}});
        cfg.alpha3 = {0.0};
        cfg.f_ratio = {0.4};
        cfg.gamma = {5e-4, 5e-3, 5e-2};
        cfg.n_thermal = {3.0};
        cfg.tiers = {"quantum"};
    } else {
        throw Error("unknown preset: " + name +
                    " (available: fig2 fig3 fig4 fig5 fig6 fig7)");
    }
    cfg.emit_svg = true;
    cfg.output_dir = "out_" + name;
    return cfg;
}

namespace {

struct PointSpec {
    std::size_t index;
    double m, a3, g, fr, nth;
    ModelParams params;
};

std::vector<PointSpec> expand_points(const ExperimentConfig& cfg)
{
    std::vector<PointSpec> pts;
    std::size_t idx = 0;
    for (double a3 : cfg.alpha3)
        for (double g : cfg.gamma)
            for (double fr : cfg.f_ratio)
                for (double nth : cfg.n_thermal)
                    for (double m : cfg.m_grid) {
                        PointSpec ps{idx++, m, a3, g, fr, nth, {}};
                        ps.params = cfg.resolve(m, a3, g, fr, nth);
                        pts.push_back(ps);
                    }
    return pts;
}

void meta_common(TableWriter& tw, const ExperimentConfig& cfg)
{
    tw.meta("generator", "kerrosc");
    tw.meta("units", "frequencies in units of alpha; detuning as 2*delta/alpha");
    tw.meta("mode", cfg.mode);
    tw.meta("n_max", cfg.n_max ? format_double(cfg.n_max) : std::string("auto"));
    tw.meta("tunnel_prefactor", cfg.tunnel_prefactor);
}

struct TierRow {
    bool ran = false, ok = false;
    double p1 = 0, p2 = 0, p3 = 0, extra1 = 0, extra2 = 0, extra3 = 0;
    std::string error;
};

ExperimentOutcome run_sweep_mode(const ExperimentConfig& cfg)
{
    ExperimentOutcome out;
    const std::vector<PointSpec> pts = expand_points(cfg);
    const std::size_t np = pts.size();
    std::vector<TierRow> rows_q(np), rows_r(np), rows_f(np);

    const bool want_q = cfg.tiers.count("quantum");
    const bool want_r = cfg.tiers.count("reduced");
    const bool want_f = cfg.tiers.count("fpe");

    // one labeling context per detuning curve: the window-relative branches
    // are insensitive to the small detuning changes within a curve
    const std::size_t n_curves = np / cfg.m_grid.size();
    std::vector<std::unique_ptr<ClassicalBranches>> curve_branches(n_curves);
    std::vector<std::once_flag> curve_once(n_curves);

    parallel_for(np, cfg.workers, [&](std::size_t i) {
        const PointSpec& ps = pts[i];
        int nm = cfg.n_max ? cfg.n_max : ps.params.default_n_max();
        const ClassicalBranches* cb = nullptr;
        if (want_q) {
            std::size_t curve = i / cfg.m_grid.size();
            std::call_once(curve_once[curve], [&] {
                try {
                    ModelParams mid = ps.params;
                    mid.delta = 0.25 * (cfg.m_grid.front() + cfg.m_grid.back());
                    mid.drive = ps.fr * mid.f_crit();
                    curve_branches[curve] =
                        std::make_unique<ClassicalBranches>(build_classical_branches(mid));
                } catch (const std::exception&) {
                    // leave null; steady_state falls back to per-point labeling
                }
            });
            cb = curve_branches[curve].get();
        }
        if (want_q) {
            TierRow& r = rows_q[i];
            r.ran = true;
            try {
                SteadyState ss = steady_state(ps.params, nm, cb);
                r.p1 = ss.occupations.p1;
                r.p2 = ss.occupations.p2;
                r.p3 = ss.occupations.p3;
                r.extra1 = ss.mean_intensity;
                r.extra2 = ss.residual;
                r.extra3 = nm;
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
        if (want_r || want_f) {
            PhasePortrait pp;
            RegionTable t1, t2, t3;
            bool tables_ok = false;
            std::string table_err;
            try {
                pp = find_stationary_points(ps.params);
                TableOptions topt;
                topt.workers = 1;   // outer loop already parallel
                t1 = tabulate_region(ps.params, pp, Region::r1, topt);
                t2 = tabulate_region(ps.params, pp, Region::r2, topt);
                t3 = tabulate_region(ps.params, pp, Region::r3, topt);
                tables_ok = true;
            } catch (const std::exception& e) {
                table_err = e.what();
            }
            if (want_r) {
                TierRow& r = rows_r[i];
                r.ran = true;
                if (!tables_ok) {
                    r.error = table_err;
                } else {
                    try {
                        ReducedOptions ropt;
                        ropt.prefactor = cfg.tunnel_prefactor;
                        ReducedModel model =
                            build_reduced_generator(ps.params, pp, t1, t2, t3, ropt);
                        ReducedSolution sol = reduced_steady_state(model);
                        r.p1 = sol.p1;
                        r.p2 = sol.p2;
                        r.p3 = sol.p3;
                        r.extra1 = (double)model.levels.size();
                        r.extra2 = (double)model.pairs.size();
                        r.extra3 = model.unpaired_region1 + model.unpaired_region3;
                        r.ok = true;
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                }
            }
            if (want_f) {
                TierRow& r = rows_f[i];
                r.ran = true;
                if (!tables_ok) {
                    r.error = table_err;
                } else {
                    try {
                        ResonanceAnchor anchor = nearest_resonance(ps.params);
                        TunnelProfileOptions popt;
                        popt.prefactor = cfg.tunnel_prefactor;
                        TunnelProfile prof =
                            lambda_profile(ps.params, pp, anchor.offset, popt);
                        StationaryDistribution dist =
                            stationary_solution(ps.params, pp, prof, t2, t3);
                        r.p1 = dist.occ1;
                        r.p2 = dist.occ2;
                        r.p3 = dist.occ3;
                        r.extra1 = prof.eps_crit;
                        r.extra2 = dist.eps_res ? *dist.eps_res
                                                : std::numeric_limits<double>::quiet_NaN();
                        r.extra3 = dist.flow_j;
                        r.ok = true;
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                }
            }
        }
    });

    std::filesystem::path dir(cfg.output_dir);
    json manifest;
    manifest["config"] = json::parse(cfg.to_json());
    manifest["config"].erase("output_dir");  // location is implicit; reruns stay byte-identical
    manifest["files"] = json::array();
    auto emit_tier = [&](const char* tier, const std::vector<TierRow>& rows,
                         const std::vector<std::string>& extras) {
        TableWriter tw(std::string("sweep_") + tier + ".tsv");
        meta_common(tw, cfg);
        std::vector<std::string> cols = {"two_delta_over_alpha", "alpha3", "gamma",
                                         "f_over_fcrit", "n_thermal", "P1", "P2", "P3"};
        cols.insert(cols.end(), extras.begin(), extras.end());
        cols.push_back("ok");
        tw.columns(cols);
        for (std::size_t i = 0; i < np; i++) {
            const PointSpec& ps = pts[i];
            const TierRow& r = rows[i];
            double nan = std::numeric_limits<double>::quiet_NaN();
            std::vector<double> vals = {ps.m, ps.a3, ps.g, ps.fr, ps.nth};
            if (r.ok)
                vals.insert(vals.end(), {r.p1, r.p2, r.p3, r.extra1, r.extra2, r.extra3});
            else
                vals.insert(vals.end(), {nan, nan, nan, nan, nan, nan});
            vals.push_back(r.ok ? 1.0 : 0.0);
            tw.row(vals);
            if (r.ran && !r.ok)
                out.errors.push_back(std::string(tier) + "[" + std::to_string(i) +
                                     "]: " + r.error);
        }
        std::string h = tw.write(dir);
        manifest["files"].push_back({{"name", tw.name()}, {"hash", h}});
        out.files.push_back(tw.name());
    };
    if (want_q)
        emit_tier("quantum", rows_q, {"mean_intensity", "residual", "n_max_used"});
    if (want_r)
        emit_tier("reduced", rows_r, {"n_levels", "n_pairs", "n_unpaired"});
    if (want_f)
        emit_tier("fpe", rows_f, {"eps_crit", "eps_res", "flow_J"});

    // summary aligning P2 across tiers
    {
        TableWriter tw("summary.tsv");
        meta_common(tw, cfg);
        tw.columns({"two_delta_over_alpha", "alpha3", "gamma", "f_over_fcrit", "n_thermal",
                    "P2_quantum", "P2_reduced", "P2_fpe"});
        double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < np; i++) {
            const PointSpec& ps = pts[i];
            tw.row({ps.m, ps.a3, ps.g, ps.fr, ps.nth,
                    rows_q[i].ok ? rows_q[i].p2 : nan, rows_r[i].ok ? rows_r[i].p2 : nan,
                    rows_f[i].ok ? rows_f[i].p2 : nan});
        }
        std::string h = tw.write(dir);
        manifest["files"].push_back({{"name", tw.name()}, {"hash", h}});
        out.files.push_back(tw.name());
    }

    if (cfg.emit_svg) {
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
        std::vector<SvgSeries> series;
        int ci = 0;
        for (auto [rows, tier] : {std::pair{&rows_q, "quantum"}, {&rows_r, "reduced"},
                                  {&rows_f, "fpe"}}) {
            if (!cfg.tiers.count(tier))
                continue;
            std::size_t curves = np / cfg.m_grid.size();
            for (std::size_t c = 0; c < curves; c++) {
                SvgSeries s;
                s.label = std::string(tier) + " #" + std::to_string(c);
                s.color = colors[ci++ % 5];
                for (std::size_t k = 0; k < cfg.m_grid.size(); k++) {
                    std::size_t i = c * cfg.m_grid.size() + k;
                    if ((*rows)[i].ok) {
                        s.x.push_back(pts[i].m);
                        s.y.push_back((*rows)[i].p2);
                    }
                }
                series.push_back(std::move(s));
            }
        }
        std::string svg = render_svg(series, "2 delta / alpha", "P2");
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "p2_sweep.svg", std::ios::binary);
        f << svg;
        manifest["files"].push_back({{"name", "p2_sweep.svg"}, {"hash", hash_hex(svg)}});
        out.files.push_back("p2_sweep.svg");
    }

    std::size_t failures = out.errors.size();
    std::size_t attempted = 0;
    for (const auto* rows : {&rows_q, &rows_r, &rows_f})
        for (const auto& r : *rows)
            attempted += r.ran ? 1 : 0;
    out.exit_code = (failures == 0) ? 0 : (failures < attempted ? 1 : 2);
    manifest["errors"] = out.errors;
    manifest["status"] = out.exit_code;
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    out.files.push_back("manifest.json");
    return out;
}

ExperimentOutcome run_spectrum_mode(const ExperimentConfig& cfg)
{
    ExperimentOutcome out;
    std::filesystem::path dir(cfg.output_dir);
    json manifest;
    manifest["config"] = json::parse(cfg.to_json());
    manifest["config"].erase("output_dir");  // location is implicit; reruns stay byte-identical
    manifest["files"] = json::array();

    std::vector<double> delta_grid;
    if (cfg.m_grid.size() >= 5) {
        for (double m : cfg.m_grid)
            delta_grid.push_back(0.5 * m);
    } else {
        // a scan needs a resolved window; expand one around the given point
        double m0 = cfg.m_grid.front();
        for (int i = 0; i < 81; i++)
            delta_grid.push_back(0.5 * (m0 - 0.02 + 0.04 * i / 80.0));
    }

    for (double a3 : cfg.alpha3) {
        ModelParams base = cfg.resolve(cfg.m_grid.front(), a3, cfg.gamma.front(),
                                       cfg.f_ratio.front(), cfg.n_thermal.front());
        ScanOptions sopt;
        sopt.n_max = cfg.n_max;
        sopt.workers = cfg.workers;
        sopt.keep_traces = true;
        ScanResult res;
        try {
            res = scan_anticrossings(base, delta_grid, sopt);
        } catch (const std::exception& e) {
            out.errors.push_back(std::string("spectrum scan failed: ") + e.what());
            continue;
        }
        std::string tag = "a3_" + compact(a3);
        TableWriter pairs("anticrossings_" + tag + ".tsv");
        meta_common(pairs, cfg);
        pairs.meta("alpha3_over_alpha", a3);
        pairs.meta("unresolved_at_edge", (double)res.unresolved_at_edge);
        pairs.columns({"two_delta_over_alpha_at_min", "min_gap", "mean_quasienergy",
                       "predicted_shift", "curve_a", "curve_b", "at_edge"});
        for (const auto& ac : res.anticrossings)
            pairs.row({2 * ac.delta_at_min, ac.min_gap, ac.mean_quasienergy,
                       ac.predicted_shift, (double)ac.curve_a, (double)ac.curve_b,
                       ac.at_grid_edge ? 1.0 : 0.0});
        std::string h = pairs.write(dir);
        manifest["files"].push_back({{"name", pairs.name()}, {"hash", h}});
        out.files.push_back(pairs.name());

        TableWriter traces("gap_traces_" + tag + ".tsv");
        meta_common(traces, cfg);
        traces.columns({"two_delta_over_alpha", "pair", "gap", "mean_quasienergy"});
        for (std::size_t a = 0; a < res.anticrossings.size(); a++)
            for (const auto& t : res.anticrossings[a].trace)
                traces.row({2 * t[0], (double)a, t[1], t[2]});
        h = traces.write(dir);
        manifest["files"].push_back({{"name", traces.name()}, {"hash", h}});
        out.files.push_back(traces.name());
    }
    out.exit_code = out.errors.empty() ? 0 : (out.files.empty() ? 2 : 1);
    manifest["errors"] = out.errors;
    manifest["status"] = out.exit_code;
    std::filesystem::create_directories(dir);
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    out.files.push_back("manifest.json");
    return out;
}

ExperimentOutcome run_tunneling_mode(const ExperimentConfig& cfg)
{
    ExperimentOutcome out;
    std::filesystem::path dir(cfg.output_dir);
    json manifest;
    manifest["config"] = json::parse(cfg.to_json());
    manifest["config"].erase("output_dir");  // location is implicit; reruns stay byte-identical
    manifest["files"] = json::array();

    for (double m : cfg.m_grid) {
        ModelParams p = cfg.resolve(m, cfg.alpha3.front(), cfg.gamma.front(),
                                    cfg.f_ratio.front(), cfg.n_thermal.front());
        try {
            PhasePortrait pp = find_stationary_points(p);
            ResonanceAnchor anchor = nearest_resonance(p);
            TunnelProfileOptions popt;
            popt.prefactor = cfg.tunnel_prefactor;
            popt.workers = cfg.workers;
            TunnelProfile prof = lambda_profile(p, pp, anchor.offset, popt);
            TableWriter tw("tunnel_profile_m_" + compact(m) + ".tsv");
            meta_common(tw, cfg);
            tw.meta("two_delta_over_alpha", m);
            tw.meta("delta_offset", anchor.offset);
            tw.meta("eps_sep", pp.eps_sep);
            tw.meta("eps1", pp.eps1);
            tw.meta("eps_crit", prof.eps_crit);
            tw.meta("eps_res", prof.eps_res ? format_double(*prof.eps_res) : "none");
            tw.meta("res_weight_flux", prof.res_weight);
            if (prof.eps_res) {
                math::Pchip t1i(prof.eps, prof.t1);
                tw.meta("res_weight_rate", prof.res_weight / t1i(*prof.eps_res));
            }
            tw.columns({"eps", "t", "delta_eps13", "gamma13", "lambda"});
            for (std::size_t i = 0; i < prof.eps.size(); i++)
                tw.row({prof.eps[i], prof.t[i], prof.mismatch[i], prof.gamma13[i],
                        prof.lambda[i]});
            std::string h = tw.write(dir);
            manifest["files"].push_back({{"name", tw.name()}, {"hash", h}});
            out.files.push_back(tw.name());
        } catch (const std::exception& e) {
            out.errors.push_back("tunneling m=" + format_double(m) + ": " + e.what());
        }
    }
    out.exit_code = out.errors.empty() ? 0 : (out.files.empty() ? 2 : 1);
    manifest["errors"] = out.errors;
    manifest["status"] = out.exit_code;
    std::filesystem::create_directories(dir);
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    out.files.push_back("manifest.json");
    return out;
}

ExperimentOutcome run_fpe_mode(const ExperimentConfig& cfg)
{
    ExperimentOutcome out;
    std::filesystem::path dir(cfg.output_dir);
    json manifest;
    manifest["config"] = json::parse(cfg.to_json());
    manifest["config"].erase("output_dir");  // location is implicit; reruns stay byte-identical
    manifest["files"] = json::array();

    for (double m : cfg.m_grid) {
        ModelParams p = cfg.resolve(m, cfg.alpha3.front(), cfg.gamma.front(),
                                    cfg.f_ratio.front(), cfg.n_thermal.front());
        try {
            PhasePortrait pp = find_stationary_points(p);
            TableOptions topt;
            topt.workers = cfg.workers;
            RegionTable t2 = tabulate_region(p, pp, Region::r2, topt);
            RegionTable t3 = tabulate_region(p, pp, Region::r3, topt);
            ResonanceAnchor anchor = nearest_resonance(p);
            TunnelProfileOptions popt;
            popt.prefactor = cfg.tunnel_prefactor;
            popt.workers = cfg.workers;
            // with tunneling, and the purely classical reference (t = 0)
            for (int variant = 0; variant < 2; variant++) {
                TunnelProfileOptions v = popt;
                if (variant == 1)
                    v.prefactor = 0.0;
                TunnelProfile prof = lambda_profile(p, pp, anchor.offset, v);
                StationaryDistribution dist = stationary_solution(p, pp, prof, t2, t3);
                std::string stem = (variant == 0 ? "fpe_m_" : "fpe_classical_m_") +
                                   compact(m);
                TableWriter tw(stem + ".tsv");
                meta_common(tw, cfg);
                tw.meta("two_delta_over_alpha", m);
                tw.meta("eps_crit", dist.eps_crit);
                tw.meta("eps_res", dist.eps_res ? format_double(*dist.eps_res) : "none");
                tw.meta("flow_J", dist.flow_j);
                tw.meta("P1", dist.occ1);
                tw.meta("P2", dist.occ2);
                tw.meta("P3", dist.occ3);
                tw.columns({"eps", "region", "P"});
                for (std::size_t i = 0; i < dist.eps2.size(); i++)
                    tw.row({dist.eps2[i], 2, dist.p2[i]});
                for (std::size_t i = 0; i < dist.eps13.size(); i++) {
                    tw.row({dist.eps13[i], 1, dist.p1[i]});
                    tw.row({dist.eps13[i], 3, dist.p3[i]});
                }
                for (std::size_t i = 0; i < dist.eps3t.size(); i++)
                    tw.row({dist.eps3t[i], 3, dist.p3t[i]});
                std::string h = tw.write(dir);
                manifest["files"].push_back({{"name", tw.name()}, {"hash", h}});
                out.files.push_back(tw.name());
            }
        } catch (const std::exception& e) {
            out.errors.push_back("fpe m=" + format_double(m) + ": " + e.what());
        }
    }
    out.exit_code = out.errors.empty() ? 0 : (out.files.empty() ? 2 : 1);
    manifest["errors"] = out.errors;
    manifest["status"] = out.exit_code;
    std::filesystem::create_directories(dir);
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    out.files.push_back("manifest.json");
    return out;
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.mode == "spectrum")
        return run_spectrum_mode(cfg);
    if (cfg.mode == "tunneling")
        return run_tunneling_mode(cfg);
    if (cfg.mode == "fpe")
        return run_fpe_mode(cfg);
    return run_sweep_mode(cfg);
}

TierComparison compare_tiers(const std::filesystem::path& sweep_dir, const std::string& tier_a,
                             const std::string& tier_b)
{
    std::ifstream in(sweep_dir / "summary.tsv");
    if (!in)
        throw Error("compare_tiers: no summary.tsv in " + sweep_dir.string());
    std::vector<std::string> cols;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line.find("two_delta_over_alpha") != std::string::npos) {
                std::istringstream ss(line.substr(1));
                std::string w;
                while (ss >> w)
                    cols.push_back(w);
            }
            continue;
        }
        std::istringstream ss(line);
        std::vector<double> vals;
        double v;
        while (ss >> v)
            vals.push_back(v);
        rows.push_back(vals);
    }
    auto col_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); i++)
            if (cols[i] == name)
                return (int)i;
        throw Error("compare_tiers: column not found: " + name);
    };
    int ia = col_index("P2_" + tier_a), ib = col_index("P2_" + tier_b);
    int im = col_index("two_delta_over_alpha"), ig = col_index("gamma");

    TierComparison cmp;
    std::vector<double> xs, ya, yb;
    TableWriter tw("compare.tsv");
    tw.meta("tier_a", tier_a);
    tw.meta("tier_b", tier_b);
    tw.columns({"two_delta_over_alpha", "P2_a", "P2_b", "rel_dev", "in_validity_band"});
    for (const auto& r : rows) {
        double a = r[ia], b = r[ib];
        if (std::isnan(a) || std::isnan(b))
            continue;
        cmp.rows++;
        double dev = std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-12});
        cmp.max_rel_dev_p2 = std::max(cmp.max_rel_dev_p2, dev);
        bool valid = (r[im] >= 12.0) && (r[ig] / (0.5 * r[im]) <= 1e-3);
        if (!valid)
            cmp.flagged++;
        tw.row({r[im], a, b, dev, valid ? 1.0 : 0.0});
        xs.push_back(r[im]);
        ya.push_back(a);
        yb.push_back(b);
    }
    if (cmp.rows == 0)
        throw Error("compare_tiers: tiers share no grid points (mismatched grids)");
    auto pa = find_peaks(xs, ya), pb = find_peaks(xs, yb);
    for (std::size_t i = 0; i < std::min(pa.size(), pb.size()); i++)
        cmp.peak_offset = std::max(cmp.peak_offset, std::fabs(pa[i].x - pb[i].x));
    tw.write(sweep_dir);
    return cmp;
}

} // namespace kerrosc
