// radarfield: closed-form and Monte Carlo detection statistics for a planar
// field of mutually interfering pulsed radars.
//
// Subcommands:
//   analytic <op>     evaluate one closed-form / quadrature quantity
//   figure <1..5>     run a canonical result table, write CSV (+JSON)
//   sweep             run a custom sweep from a spec file or manifest
//   scene-dump        write one sampled field realisation as CSV
//   pattern-dump      write gain-vs-angle samples of an antenna pattern
//
// Exit codes: 0 success, 2 validation error, 3 numerical/resource failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "radarfield/analytic.hpp"
#include "radarfield/antenna.hpp"
#include "radarfield/montecarlo.hpp"
#include "radarfield/scene.hpp"
#include "radarfield/sweep.hpp"
#include "radarfield/units.hpp"

namespace rf = radarfield;
using rf::units::dbm_to_watt;
using rf::units::ghz_to_hz;

namespace {

struct ParamFlags {
    double lambda = 1e-4;
    int m = 100;
    double phi_deg = 30.0;
    double alpha = 2.0;
    bool alpha_limit = false;
    double pt_dbm = 10.0;
    double freq_ghz = 60.0;
    double kappa = 10.0;
    double sigma = 10.0;
    double pfa = 0.1;
    std::string fading = "none";

    CLI::App* cmd = nullptr;

    void attach(CLI::App* c) {
        cmd = c;
        c->add_option("--lambda", lambda, "radar density [1/m^2]");
        c->add_option("--m", m, "slots per cycle (1 tx + m-1 listen)");
        c->add_option("--phi-deg", phi_deg, "beamwidth [deg]");
        c->add_option("--alpha", alpha, "path-loss exponent");
        c->add_flag("--alpha-limit", alpha_limit, "accept alpha == 2 as the declared limit");
        c->add_option("--pt-dbm", pt_dbm, "transmit power [dBm]");
        c->add_option("--freq-ghz", freq_ghz, "carrier frequency [GHz]");
        c->add_option("--kappa", kappa, "processing gain (linear)");
        c->add_option("--sigma", sigma, "radar cross section [m^2]");
        c->add_option("--pfa", pfa, "false-alarm target");
        c->add_option("--fading", fading, "none|rayleigh");
    }

    bool given(const char* name) const { return cmd && cmd->count(name) > 0; }

    rf::RadarParams to_params() const {
        rf::RadarParams p;
        p.lambda = lambda;
        p.m = m;
        p.phi = rf::units::deg_to_rad(phi_deg);
        p.alpha = alpha;
        p.alpha_limit = alpha_limit || alpha == 2.0;  // CLI treats alpha 2 as the limit
        p.pt = dbm_to_watt(pt_dbm);
        p.freq = ghz_to_hz(freq_ghz);
        p.kappa = kappa;
        p.sigma = sigma;
        p.pfa = pfa;
        p.fading = fading == "rayleigh" ? rf::Fading::Rayleigh : rf::Fading::NoFading;
        return p;
    }

    /// Overlays only the flags the user actually passed onto `p`.
    void overlay(rf::RadarParams& p) const {
        if (given("--lambda")) p.lambda = lambda;
        if (given("--m")) p.m = m;
        if (given("--phi-deg")) p.phi = rf::units::deg_to_rad(phi_deg);
        if (given("--alpha")) p.alpha = alpha;
        if (given("--alpha-limit")) p.alpha_limit = alpha_limit;
        if (given("--alpha") && alpha == 2.0) p.alpha_limit = true;
        if (given("--pt-dbm")) p.pt = dbm_to_watt(pt_dbm);
        if (given("--freq-ghz")) p.freq = ghz_to_hz(freq_ghz);
        if (given("--kappa")) p.kappa = kappa;
        if (given("--sigma")) p.sigma = sigma;
        if (given("--pfa")) p.pfa = pfa;
        if (given("--fading"))
            p.fading = fading == "rayleigh" ? rf::Fading::Rayleigh : rf::Fading::NoFading;
    }
};

struct NoiseFlags {
    double temp = 290.0;
    double bandwidth_mhz = 125.0;
    double noise_figure = 10.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--temp", temp, "receiver temperature [K]");
        cmd->add_option("--bandwidth-mhz", bandwidth_mhz, "receiver bandwidth [MHz]");
        cmd->add_option("--noise-figure", noise_figure, "noise figure (linear)");
    }

    rf::NoiseParams to_params() const {
        rf::NoiseParams n;
        n.temp = temp;
        n.bandwidth = rf::units::mhz_to_hz(bandwidth_mhz);
        n.noise_figure = noise_figure;
        return n;
    }
};

void print_power(const char* label, double watts) {
    std::printf("%s: %.12g W (%.4f dBm)\n", label, watts, rf::units::watt_to_dbm(watts));
}

int run_analytic(const std::string& op, const ParamFlags& pf, const NoiseFlags& nf, double d,
                 double zeta, double i_watt, double z_watt) {
    const rf::RadarParams p = pf.to_params();
    const rf::NoiseParams n = nf.to_params();
    namespace an = rf::analytic;
    if (op == "echo-power") print_power("echo power", an::echo_power(d, zeta, p));
    else if (op == "fading-moment")
        std::printf("fading moment: %.12g\n", an::fading_moment(p.alpha, p.fading, p.alpha_limit));
    else if (op == "strongest-cdf")
        std::printf("strongest-interferer CDF: %.12g\n", an::strongest_cdf(i_watt, p));
    else if (op == "strongest-pdf")
        std::printf("strongest-interferer pdf: %.12g [1/W]\n", an::strongest_pdf(i_watt, p));
    else if (op == "detection-threshold")
        print_power("detection threshold", an::detection_threshold(p));
    else if (op == "max-range")
        std::printf("max range: %.6f m\n", an::max_range_no_fading(p));
    else if (op == "pd") {
        const double pd = p.fading == rf::Fading::Rayleigh
                              ? an::detection_probability_rayleigh(d, p)
                              : an::detection_probability_no_fading(d, p);
        std::printf("detection probability at %.6g m: %.12g\n", d, pd);
    } else if (op == "pd-floor")
        std::printf("detection floor: %.12g\n", an::detection_floor(p));
    else if (op == "noise-power") print_power("noise power", an::noise_power(n));
    else if (op == "noise-interference-cdf")
        std::printf("noise+interference CDF: %.12g\n", an::noise_interference_cdf(z_watt, p, n));
    else if (op == "threshold-with-noise")
        print_power("threshold (noise+interference)", an::threshold_with_noise(p, n));
    else if (op == "max-range-with-noise")
        std::printf("max range (noise+interference): %.6f m\n", an::max_range_with_noise(p, n));
    else if (op == "threshold-noise-only")
        print_power("threshold (noise only)", an::threshold_noise_only(p, n));
    else if (op == "max-range-noise-only")
        std::printf("max range (noise only): %.6f m\n", an::max_range_noise_only(p, n));
    else
        throw rf::ValidationError(
            "unknown analytic op '" + op +
            "'. Ops: echo-power fading-moment strongest-cdf strongest-pdf detection-threshold "
            "max-range pd pd-floor noise-power noise-interference-cdf threshold-with-noise "
            "max-range-with-noise threshold-noise-only max-range-noise-only");
    return 0;
}

std::string output_path(const std::string& out, const std::string& fallback_name) {
    if (!out.empty()) return out;
    return rf::experiments::default_out_dir() + "/" + fallback_name;
}

void write_result(const rf::experiments::SweepResult& result, const std::string& csv_path) {
    rf::experiments::write_csv(result, csv_path);
    std::string json_path = csv_path;
    const auto dot = json_path.rfind(".csv");
    if (dot != std::string::npos) json_path.erase(dot);
    json_path += ".json";
    rf::experiments::write_json(result, json_path);
    std::fprintf(stderr, "wrote %s and %s (%.1f s)\n", csv_path.c_str(), json_path.c_str(),
                 result.metadata.value("runtime_s", 0.0));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radar interference statistics: closed forms and Monte Carlo"};
    app.require_subcommand(1);

    // ---- analytic ----
    auto* cmd_analytic = app.add_subcommand("analytic", "evaluate one closed-form quantity");
    std::string op;
    cmd_analytic->add_option("op", op, "operation name")->required();
    ParamFlags apf;
    NoiseFlags anf;
    apf.attach(cmd_analytic);
    anf.attach(cmd_analytic);
    double a_d = 10.0, a_zeta = 1.0, a_i = 1e-10, a_z = 1e-10;
    cmd_analytic->add_option("--d", a_d, "target distance [m]");
    cmd_analytic->add_option("--zeta", a_zeta, "fading draw for echo-power");
    cmd_analytic->add_option("--i", a_i, "interference power argument [W]");
    cmd_analytic->add_option("--z", a_z, "total power argument [W]");

    // ---- figure ----
    auto* cmd_figure = app.add_subcommand("figure", "run a canonical result table");
    int fig_no = 1;
    cmd_figure->add_option("index", fig_no, "figure index 1..5")->required();
    ParamFlags fpf;
    NoiseFlags fnf;
    std::string fig_out, fig_pattern = "cone";
    std::uint64_t fig_seed = 1;
    int fig_threads = 0, fig_mc_points = 8, fig_axis_points = 0;
    long long fig_trials = 10000, fig_cal = 100000, fig_dm_trials = 2000;
    bool fig_no_mc = false;
    cmd_figure->add_option("--out", fig_out, "output CSV path");
    cmd_figure->add_option("--seed", fig_seed, "root seed");
    cmd_figure->add_option("--threads", fig_threads, "worker threads (0: all cores)");
    cmd_figure->add_option("--trials", fig_trials, "detection trials per MC marker");
    cmd_figure->add_option("--cal-samples", fig_cal, "interference samples per calibration");
    cmd_figure->add_option("--dm-trials", fig_dm_trials, "trials per range-bisection step");
    cmd_figure->add_option("--mc-points", fig_mc_points, "MC markers per curve");
    cmd_figure->add_option("--axis-points", fig_axis_points, "override axis resolution");
    cmd_figure->add_option("--pattern", fig_pattern, "cone|array (where applicable)");
    cmd_figure->add_flag("--no-mc", fig_no_mc, "analytic columns only");
    fpf.attach(cmd_figure);
    fnf.attach(cmd_figure);

    // ---- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "run a custom sweep");
    std::string sweep_spec_path, sweep_manifest_path, sweep_out;
    std::uint64_t sweep_seed = 0;
    bool sweep_seed_set = false;
    cmd_sweep->add_option("--spec", sweep_spec_path, "flat key=value spec file");
    cmd_sweep->add_option("--from-manifest", sweep_manifest_path,
                          "reproduce a previous run from its CSV/JSON manifest");
    cmd_sweep->add_option("--out", sweep_out, "output CSV path (overrides spec)");
    cmd_sweep->add_option("--seed", sweep_seed, "override the spec seed")
        ->each([&](const std::string&) { sweep_seed_set = true; });

    // ---- scene-dump ----
    auto* cmd_scene = app.add_subcommand("scene-dump", "write one sampled field as CSV");
    ParamFlags spf;
    double scene_radius = 0.0;
    std::uint64_t scene_seed = 1;
    std::string scene_out;
    cmd_scene->add_option("--radius", scene_radius, "window radius [m] (default: derived)");
    cmd_scene->add_option("--seed", scene_seed, "scene seed");
    cmd_scene->add_option("--out", scene_out, "output CSV path");
    spf.attach(cmd_scene);

    // ---- pattern-dump ----
    auto* cmd_pattern = app.add_subcommand("pattern-dump", "write gain vs angle as CSV");
    std::string pat_kind = "cone", pat_out;
    double pat_phi_deg = 30.0, pat_spacing = 0.5, pat_floor_db = -10.0;
    int pat_elements = 4, pat_points = 1441;
    cmd_pattern->add_option("--pattern", pat_kind, "cone|array");
    cmd_pattern->add_option("--phi-deg", pat_phi_deg, "cone beamwidth [deg]");
    cmd_pattern->add_option("--elements", pat_elements, "array elements per side");
    cmd_pattern->add_option("--spacing", pat_spacing, "array spacing [wavelengths]");
    cmd_pattern->add_option("--floor-db", pat_floor_db, "array sidelobe floor [dB]");
    cmd_pattern->add_option("--points", pat_points, "sample count");
    cmd_pattern->add_option("--out", pat_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_analytic) return run_analytic(op, apf, anf, a_d, a_zeta, a_i, a_z);

        if (*cmd_figure) {
            rf::experiments::SweepSpec spec = rf::experiments::figure_defaults(fig_no);
            // figure presets own alpha/fading/freq/pt; explicit flags override
            fpf.overlay(spec.params);
            spec.noise = fnf.to_params();
            spec.seed = fig_seed;
            spec.threads = fig_threads;
            spec.pd_trials = fig_trials;
            spec.cal_samples = fig_cal;
            spec.dm_trials = fig_dm_trials;
            spec.mc_points = fig_mc_points;
            if (fig_axis_points > 0) spec.axis_points = fig_axis_points;
            if (fig_no_mc) spec.methods = {rf::experiments::Method::Analytic};
            spec.pattern = fig_pattern == "array" ? rf::experiments::PatternKind::PlanarArray
                                                  : rf::experiments::PatternKind::Cone;
            char fallback[32];
            std::snprintf(fallback, sizeof fallback, "fig%d.csv", fig_no);
            const std::string path = output_path(fig_out, fallback);
            const auto result = rf::experiments::run_figure(fig_no, spec);
            write_result(result, path);
            return 0;
        }

        if (*cmd_sweep) {
            if (sweep_spec_path.empty() == sweep_manifest_path.empty())
                throw rf::ValidationError("sweep: pass exactly one of --spec or --from-manifest");
            rf::experiments::SweepSpec spec =
                sweep_spec_path.empty()
                    ? rf::experiments::spec_from_manifest_file(sweep_manifest_path)
                    : rf::experiments::parse_spec_file(sweep_spec_path);
            if (sweep_seed_set) spec.seed = sweep_seed;
            if (!sweep_out.empty()) spec.out_path = sweep_out;
            const std::string path = output_path(spec.out_path, "sweep.csv");
            const auto result = spec.figure >= 1 && spec.figure <= 5
                                    ? rf::experiments::run_figure(spec.figure, spec)
                                    : rf::experiments::run_custom(spec);
            write_result(result, path);
            return 0;
        }

        if (*cmd_scene) {
            const rf::RadarParams p = spf.to_params();
            double radius = scene_radius;
            if (radius <= 0.0)
                radius = rf::field::window_radius(p, rf::analytic::detection_threshold(p));
            const rf::field::Scene scene = rf::field::sample_scene(p, radius, scene_seed);
            const std::string path = output_path(scene_out, "scene.csv");
            std::ofstream f(path);
            if (!f) throw rf::ValidationError("cannot open output file: " + path);
            f << "# radius_m=" << radius << " seed=" << scene_seed << " lambda=" << p.lambda
              << " m=" << p.m << " count=" << scene.size() << "\n";
            f << "x_m,y_m,boresight_rad,mark,fading_stream\n";
            for (std::int64_t i = 0; i < scene.size(); ++i)
                f << scene.x[i] << "," << scene.y[i] << "," << scene.boresight[i] << ","
                  << scene.mark_of(i) << "," << i << "\n";
            std::fprintf(stderr, "wrote %s (%lld points)\n", path.c_str(),
                         static_cast<long long>(scene.size()));
            return 0;
        }

        if (*cmd_pattern) {
            const rf::antenna::AntennaPattern pattern =
                pat_kind == "array"
                    ? rf::antenna::AntennaPattern::planar_array(pat_elements, pat_spacing,
                                                                pat_floor_db)
                    : rf::antenna::AntennaPattern::cone(rf::units::deg_to_rad(pat_phi_deg));
            const auto table = rf::antenna::sample_pattern(pattern, pat_points);
            const std::string path = output_path(pat_out, "pattern.csv");
            std::ofstream f(path);
            if (!f) throw rf::ValidationError("cannot open output file: " + path);
            f << "theta_rad,gain\n";
            for (Eigen::Index i = 0; i < table.rows(); ++i)
                f << table(i, 0) << "," << table(i, 1) << "\n";
            if (pattern.kind() == rf::antenna::AntennaPattern::Kind::PlanarArray)
                std::fprintf(stderr, "hpbw %.2f deg, first sidelobe %.2f dB\n",
                             rf::units::rad_to_deg(pattern.beamwidth()),
                             pattern.first_sidelobe_db());
            std::fprintf(stderr, "wrote %s\n", path.c_str());
            return 0;
        }
    } catch (const rf::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const rf::ResourceError& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
