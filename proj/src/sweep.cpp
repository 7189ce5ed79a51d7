#include "radarfield/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "radarfield/analytic.hpp"
#include "radarfield/montecarlo.hpp"
#include "radarfield/units.hpp"

namespace radarfield::experiments {

using nlohmann::json;

// ---------------------------------------------------------------------------
// enum names and parsing

const char* to_string(Axis a) {
    switch (a) {
        case Axis::Distance: return "d";
        case Axis::Lambda: return "lambda";
        case Axis::Phi: return "phi";
        case Axis::Pfa: return "pfa";
    }
    return "?";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Analytic: return "analytic";
        case Method::McStrongest: return "mc_strongest";
        case Method::McAggregate: return "mc_aggregate";
    }
    return "?";
}

const char* to_string(PatternKind k) {
    return k == PatternKind::Cone ? "cone" : "array";
}

const char* to_string(Quantity q) {
    switch (q) {
        case Quantity::Auto: return "auto";
        case Quantity::DetectionProbability: return "pd";
        case Quantity::MaxRange: return "dm";
    }
    return "?";
}

namespace {

Axis axis_from_string(const std::string& s) {
    if (s == "d" || s == "distance") return Axis::Distance;
    if (s == "lambda") return Axis::Lambda;
    if (s == "phi") return Axis::Phi;
    if (s == "pfa") return Axis::Pfa;
    throw ValidationError("unknown axis '" + s + "' (expected d|lambda|phi|pfa)");
}

Method method_from_string(const std::string& s) {
    if (s == "analytic") return Method::Analytic;
    if (s == "mc_strongest") return Method::McStrongest;
    if (s == "mc_aggregate") return Method::McAggregate;
    throw ValidationError("unknown method '" + s + "' (expected analytic|mc_strongest|mc_aggregate)");
}

PatternKind pattern_from_string(const std::string& s) {
    if (s == "cone") return PatternKind::Cone;
    if (s == "array") return PatternKind::PlanarArray;
    throw ValidationError("unknown pattern '" + s + "' (expected cone|array)");
}

Quantity quantity_from_string(const std::string& s) {
    if (s == "auto") return Quantity::Auto;
    if (s == "pd") return Quantity::DetectionProbability;
    if (s == "dm") return Quantity::MaxRange;
    throw ValidationError("unknown quantity '" + s + "' (expected auto|pd|dm)");
}

Fading fading_from_string(const std::string& s) {
    if (s == "none" || s == "nofading") return Fading::NoFading;
    if (s == "rayleigh") return Fading::Rayleigh;
    throw ValidationError("unknown fading '" + s + "' (expected none|rayleigh)");
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// SweepSpec

void SweepSpec::validate() const {
    std::vector<std::string> bad;
    if (figure < 0 || figure > 5) bad.push_back("figure must be 0 (custom) or 1..5");
    if (axis_points < 1) bad.push_back("axis_points must be >= 1");
    if (!(axis_min > 0.0) && (log_axis || axis != Axis::Distance))
        bad.push_back("axis_min must be > 0");
    if (axis_points > 1 && !(axis_max > axis_min)) bad.push_back("axis_max must exceed axis_min");
    if (methods.empty()) bad.push_back("methods must be nonempty");
    if (!(target_distance > 0.0)) bad.push_back("d (target distance) must be > 0");
    if (cal_samples < 1) bad.push_back("cal_samples must be >= 1");
    if (pd_trials < 1) bad.push_back("pd_trials must be >= 1");
    if (dm_trials < 1) bad.push_back("dm_trials must be >= 1");
    if (mc_points < 1) bad.push_back("mc_points must be >= 1");
    if (!(level > 0.0 && level < 1.0)) bad.push_back("level must be in (0, 1)");
    const Quantity qty = quantity == Quantity::Auto
                             ? (axis == Axis::Distance ? Quantity::DetectionProbability
                                                       : Quantity::MaxRange)
                             : quantity;
    if (qty == Quantity::MaxRange && axis == Axis::Distance)
        bad.push_back("quantity dm cannot sweep the d axis");
    if (with_noise && qty != Quantity::MaxRange)
        bad.push_back("with_noise applies to max-range (dm) sweeps only");
    const bool wants_mc =
        std::find_if(methods.begin(), methods.end(),
                     [](Method m) { return m != Method::Analytic; }) != methods.end();
    if (wants_mc && params.lambda == 0.0 && axis != Axis::Lambda)
        bad.push_back("mc methods need lambda > 0");
    if (!bad.empty()) {
        std::ostringstream os;
        os << "invalid sweep spec:";
        for (const auto& s : bad) os << " [" << s << "]";
        throw ValidationError(os.str());
    }
    params.validate();
    if (with_noise) noise.validate();
}

json SweepSpec::to_json() const {
    json j;
    j["figure"] = figure;
    j["axis"] = to_string(axis);
    j["axis_min"] = axis_min;
    j["axis_max"] = axis_max;
    j["axis_points"] = axis_points;
    j["axis_scale"] = log_axis ? "log" : "linear";
    j["quantity"] = to_string(quantity);
    json ms = json::array();
    for (Method m : methods) ms.push_back(to_string(m));
    j["methods"] = ms;
    j["pattern"] = to_string(pattern);
    j["array"] = {{"elements_per_side", array.elements_per_side},
                  {"spacing_wavelengths", array.spacing_wavelengths},
                  {"sidelobe_floor_db", array.sidelobe_floor_db}};
    j["params"] = {{"lambda", params.lambda}, {"m", params.m},       {"phi", params.phi},
                   {"alpha", params.alpha},   {"alpha_limit", params.alpha_limit},
                   {"pt", params.pt},         {"freq", params.freq}, {"kappa", params.kappa},
                   {"sigma", params.sigma},   {"pfa", params.pfa},
                   {"fading", radarfield::to_string(params.fading)}};
    j["with_noise"] = with_noise;
    j["noise"] = {{"temp", noise.temp},
                  {"bandwidth", noise.bandwidth},
                  {"noise_figure", noise.noise_figure}};
    j["d"] = target_distance;
    j["seed"] = seed;
    j["threads"] = threads;
    j["budgets"] = {{"cal_samples", cal_samples}, {"pd_trials", pd_trials},
                    {"dm_trials", dm_trials},     {"mc_points", mc_points},
                    {"level", level}};
    return j;
}

SweepSpec SweepSpec::from_json(const json& j) {
    SweepSpec s;
    s.figure = j.value("figure", 0);
    s.axis = axis_from_string(j.value("axis", "lambda"));
    s.axis_min = j.value("axis_min", s.axis_min);
    s.axis_max = j.value("axis_max", s.axis_max);
    s.axis_points = j.value("axis_points", s.axis_points);
    s.log_axis = j.value("axis_scale", "log") == std::string("log");
    s.quantity = quantity_from_string(j.value("quantity", "auto"));
    if (j.contains("methods")) {
        s.methods.clear();
        for (const auto& m : j["methods"]) s.methods.push_back(method_from_string(m));
    }
    s.pattern = pattern_from_string(j.value("pattern", "cone"));
    if (j.contains("array")) {
        const auto& a = j["array"];
        s.array.elements_per_side = a.value("elements_per_side", 4);
        s.array.spacing_wavelengths = a.value("spacing_wavelengths", 0.5);
        s.array.sidelobe_floor_db = a.value("sidelobe_floor_db", -10.0);
    }
    if (j.contains("params")) {
        const auto& p = j["params"];
        s.params.lambda = p.value("lambda", s.params.lambda);
        s.params.m = p.value("m", s.params.m);
        s.params.phi = p.value("phi", s.params.phi);
        s.params.alpha = p.value("alpha", s.params.alpha);
        s.params.alpha_limit = p.value("alpha_limit", s.params.alpha_limit);
        s.params.pt = p.value("pt", s.params.pt);
        s.params.freq = p.value("freq", s.params.freq);
        s.params.kappa = p.value("kappa", s.params.kappa);
        s.params.sigma = p.value("sigma", s.params.sigma);
        s.params.pfa = p.value("pfa", s.params.pfa);
        s.params.fading = fading_from_string(p.value("fading", "none"));
    }
    s.with_noise = j.value("with_noise", false);
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        s.noise.temp = n.value("temp", s.noise.temp);
        s.noise.bandwidth = n.value("bandwidth", s.noise.bandwidth);
        s.noise.noise_figure = n.value("noise_figure", s.noise.noise_figure);
    }
    s.target_distance = j.value("d", s.target_distance);
    s.seed = j.value("seed", s.seed);
    s.threads = j.value("threads", 0);
    if (j.contains("budgets")) {
        const auto& b = j["budgets"];
        s.cal_samples = b.value("cal_samples", s.cal_samples);
        s.pd_trials = b.value("pd_trials", s.pd_trials);
        s.dm_trials = b.value("dm_trials", s.dm_trials);
        s.mc_points = b.value("mc_points", s.mc_points);
        s.level = b.value("level", s.level);
    }
    return s;
}

// ---------------------------------------------------------------------------
// shared machinery

namespace {

Eigen::ArrayXd make_axis(const SweepSpec& spec) {
    Eigen::ArrayXd axis(spec.axis_points);
    if (spec.axis_points == 1) {
        axis[0] = spec.axis_min;
        return axis;
    }
    for (int i = 0; i < spec.axis_points; ++i) {
        const double t = static_cast<double>(i) / (spec.axis_points - 1);
        axis[i] = spec.log_axis
                      ? std::exp(std::log(spec.axis_min) +
                                 t * (std::log(spec.axis_max) - std::log(spec.axis_min)))
                      : spec.axis_min + t * (spec.axis_max - spec.axis_min);
    }
    return axis;
}

SweepColumn make_column(const std::string& name, int n, bool has_ci) {
    SweepColumn c;
    c.name = name;
    c.values = Eigen::ArrayXd::Constant(n, std::nan(""));
    c.ci_low = Eigen::ArrayXd::Constant(n, std::nan(""));
    c.ci_high = Eigen::ArrayXd::Constant(n, std::nan(""));
    c.has_ci = has_ci;
    return c;
}

// Roughly evenly spread marker indices for MC columns.
std::vector<int> mc_mark_indices(int n_axis, int mc_points) {
    std::set<int> marks;
    const int m = std::min(n_axis, mc_points);
    for (int k = 0; k < m; ++k)
        marks.insert(static_cast<int>(std::llround((k + 0.5) * n_axis / static_cast<double>(m) - 0.5)));
    return {marks.begin(), marks.end()};
}

bool has_method(const SweepSpec& spec, Method m) {
    return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end();
}

RadarParams with_axis_value(const RadarParams& base, Axis axis, double v) {
    RadarParams p = base;
    switch (axis) {
        case Axis::Lambda: p.lambda = v; break;
        case Axis::Phi: p.phi = v; break;
        case Axis::Pfa: p.pfa = v; break;
        case Axis::Distance: break;
    }
    return p;
}

double analytic_pd(double d, const RadarParams& p) {
    return p.fading == Fading::Rayleigh ? analytic::detection_probability_rayleigh(d, p)
                                        : analytic::detection_probability_no_fading(d, p);
}

// Analytic maximum range at the given Pd level. The no-fading curve is a
// step, so the level collapses to the closed-form range; under Rayleigh
// fading the level crossing is found by bisection.
double analytic_max_range(const RadarParams& p, double level) {
    if (p.fading == Fading::NoFading) return analytic::max_range_no_fading(p);
    RadarParams nf = p;
    nf.fading = Fading::NoFading;
    const double scale = analytic::max_range_no_fading(nf);
    double lo = scale * 1e-3, hi = scale;
    while (analytic_pd(hi, p) >= level) hi *= 2.0;
    while (analytic_pd(lo, p) < level) lo *= 0.5;
    return analytic::analytic_range_at_level(p, level, lo, hi);
}

json pattern_metadata(const antenna::AntennaPattern& pat) {
    json j;
    if (pat.kind() == antenna::AntennaPattern::Kind::Cone) {
        j["kind"] = "cone";
        j["beamwidth_deg"] = units::rad_to_deg(pat.beamwidth());
        j["peak_gain"] = pat.peak_gain();
    } else {
        j["kind"] = "array";
        j["elements_per_side"] = pat.elements_per_side();
        j["spacing_wavelengths"] = pat.spacing_wavelengths();
        j["sidelobe_floor_db"] = pat.sidelobe_floor_db();
        j["measured_hpbw_deg"] = units::rad_to_deg(pat.beamwidth());
        j["measured_first_sidelobe_db"] = pat.first_sidelobe_db();
        j["peak_gain"] = pat.peak_gain();
    }
    return j;
}

json base_metadata(const SweepSpec& spec, const antenna::AntennaPattern& pat) {
    json meta;
    meta["tool"] = "radarfield";
    meta["version"] = kVersion;
    meta["timestamp"] = iso8601_now();
    meta["spec"] = spec.to_json();
    meta["pattern"] = pattern_metadata(pat);
    meta["window_rule"] = {{"power_epsilon", field::kWindowPowerEpsilon},
                           {"spacing_factor", 10.0}};
    meta["notes"] = json::array();
    return meta;
}

void add_window_metadata(json& meta, const RadarParams& p) {
    if (p.lambda <= 0.0) return;
    const field::WindowInfo w = field::window_radius_info(p, analytic::detection_threshold(p));
    meta["window"] = {{"radius_m", w.radius},
                      {"power_radius_m", w.power_radius},
                      {"spacing_radius_m", w.spacing_radius},
                      {"binding_rule", w.spacing_binds ? "spacing" : "power"}};
}

// One calibrated Monte Carlo max-range estimate.
mc::Estimate mc_max_range(const RadarParams& p, const antenna::AntennaPattern& pat,
                          const SweepSpec& spec, std::uint64_t seed, bool use_strongest) {
    mc::McConfig cfg;
    cfg.seed = seed;
    cfg.threads = spec.threads;
    const mc::InterferenceSamples samples =
        mc::collect_interference(p, pat, spec.cal_samples, cfg);
    const double theta = mc::calibrate_threshold(
        use_strongest ? samples.strongest : samples.aggregate, p);
    return mc::estimate_max_range(theta, p, pat, cfg, spec.level, spec.dm_trials, use_strongest);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace

antenna::AntennaPattern make_pattern(const SweepSpec& spec) {
    if (spec.pattern == PatternKind::Cone) return antenna::AntennaPattern::cone(spec.params.phi);
    return antenna::AntennaPattern::planar_array(spec.array.elements_per_side,
                                                 spec.array.spacing_wavelengths,
                                                 spec.array.sidelobe_floor_db);
}

const SweepColumn* SweepResult::find(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

// ---------------------------------------------------------------------------
// custom sweep

SweepResult run_custom(const SweepSpec& spec) {
    Timer timer;
    spec.validate();
    const Quantity qty = spec.quantity == Quantity::Auto
                             ? (spec.axis == Axis::Distance ? Quantity::DetectionProbability
                                                            : Quantity::MaxRange)
                             : spec.quantity;
    const antenna::AntennaPattern pattern = make_pattern(spec);
    SweepResult result;
    result.axis_name = to_string(spec.axis);
    result.axis = make_axis(spec);
    result.metadata = base_metadata(spec, pattern);
    add_window_metadata(result.metadata, spec.params);
    const int n = spec.axis_points;

    if (qty == Quantity::DetectionProbability) {
        const bool d_axis = spec.axis == Axis::Distance;
        if (has_method(spec, Method::Analytic)) {
            SweepColumn col = make_column("pd_analytic", n, false);
            for (int i = 0; i < n; ++i) {
                const RadarParams p = with_axis_value(spec.params, spec.axis, result.axis[i]);
                const double d = d_axis ? result.axis[i] : spec.target_distance;
                col.values[i] = analytic_pd(d, p);
            }
            result.columns.push_back(std::move(col));
        }
        for (Method method : {Method::McAggregate, Method::McStrongest}) {
            if (!has_method(spec, method)) continue;
            const bool strongest = method == Method::McStrongest;
            SweepColumn col = make_column(std::string("pd_") + to_string(method), n, true);
            const auto marks = mc_mark_indices(n, spec.mc_points);
            // The interference law is fixed along d and pfa axes: calibrate once.
            const bool law_fixed = d_axis || spec.axis == Axis::Pfa;
            double theta = 0.0;
            mc::InterferenceSamples samples;
            if (law_fixed) {
                mc::McConfig cal_cfg;
                cal_cfg.seed = rng::derive(spec.seed, rng::kTagGeneric, strongest ? 11 : 10);
                cal_cfg.threads = spec.threads;
                samples = mc::collect_interference(spec.params, pattern, spec.cal_samples, cal_cfg);
            }
            for (int i : marks) {
                const RadarParams p = with_axis_value(spec.params, spec.axis, result.axis[i]);
                const double d = d_axis ? result.axis[i] : spec.target_distance;
                mc::McConfig cfg;
                cfg.seed = rng::derive(spec.seed, rng::kTagGeneric, 100 + i);
                cfg.threads = spec.threads;
                if (!law_fixed) {
                    mc::McConfig cal_cfg = cfg;
                    cal_cfg.seed = rng::derive(cfg.seed, rng::kTagGeneric, strongest ? 11 : 10);
                    samples = mc::collect_interference(p, pattern, spec.cal_samples, cal_cfg);
                }
                theta = mc::calibrate_threshold(strongest ? samples.strongest : samples.aggregate, p);
                const mc::Estimate e =
                    mc::estimate_pd(d, theta, p, pattern, spec.pd_trials, cfg, strongest);
                col.values[i] = e.value;
                col.ci_low[i] = e.ci_low;
                col.ci_high[i] = e.ci_high;
            }
            result.columns.push_back(std::move(col));
        }
    } else {
        if (has_method(spec, Method::Analytic)) {
            SweepColumn col = make_column("dm_analytic", n, false);
            for (int i = 0; i < n; ++i)
                col.values[i] =
                    analytic_max_range(with_axis_value(spec.params, spec.axis, result.axis[i]),
                                       spec.level);
            result.columns.push_back(std::move(col));
            if (spec.with_noise) {
                SweepColumn ni = make_column("dm_analytic_noise_interference", n, false);
                SweepColumn no = make_column("dm_analytic_noise_only", n, false);
                for (int i = 0; i < n; ++i) {
                    const RadarParams p = with_axis_value(spec.params, spec.axis, result.axis[i]);
                    ni.values[i] = analytic::max_range_with_noise(p, spec.noise);
                    no.values[i] = analytic::max_range_noise_only(p, spec.noise);
                }
                result.columns.push_back(std::move(ni));
                result.columns.push_back(std::move(no));
            }
        }
        for (Method method : {Method::McAggregate, Method::McStrongest}) {
            if (!has_method(spec, method)) continue;
            const bool strongest = method == Method::McStrongest;
            SweepColumn col = make_column(std::string("dm_") + to_string(method), n, true);
            for (int i : mc_mark_indices(n, std::max(spec.mc_points, n))) {
                const RadarParams p = with_axis_value(spec.params, spec.axis, result.axis[i]);
                const mc::Estimate e = mc_max_range(
                    p, pattern, spec, rng::derive(spec.seed, rng::kTagGeneric, 100 + i), strongest);
                col.values[i] = e.value;
                col.ci_low[i] = e.ci_low;
                col.ci_high[i] = e.ci_high;
            }
            result.columns.push_back(std::move(col));
        }
    }

    result.metadata["runtime_s"] = timer.seconds();
    return result;
}

// ---------------------------------------------------------------------------
// canonical figures

SweepSpec figure_defaults(int which) {
    SweepSpec s;
    s.figure = which;
    switch (which) {
        case 1:
            s.axis = Axis::Distance;
            s.axis_min = 1.0;
            s.axis_max = 60.0;
            s.axis_points = 40;
            s.log_axis = false;
            s.quantity = Quantity::DetectionProbability;
            s.methods = {Method::Analytic, Method::McAggregate};
            break;
        case 2:
            s.axis = Axis::Lambda;
            s.axis_min = 1e-6;
            s.axis_max = 1e-3;
            s.axis_points = 7;
            s.methods = {Method::Analytic, Method::McAggregate};
            break;
        case 3:
            s.axis = Axis::Phi;
            s.axis_min = 0.03;
            s.axis_max = 2.0 * M_PI;
            s.axis_points = 12;
            s.methods = {Method::Analytic, Method::McAggregate};
            break;
        case 4:
            s.axis = Axis::Pfa;
            s.axis_min = 1e-3;
            s.axis_max = 0.9;
            s.axis_points = 25;
            s.quantity = Quantity::DetectionProbability;
            s.methods = {Method::Analytic};
            s.params.alpha = 3.0;
            s.params.alpha_limit = false;
            s.params.fading = Fading::Rayleigh;
            s.params.freq = 2.4e9;
            break;
        case 5:
            s.axis = Axis::Lambda;
            s.axis_min = 1e-9;
            s.axis_max = 1e-3;
            s.axis_points = 13;
            s.methods = {Method::Analytic};
            s.params.pt = 0.1;  // 20 dBm
            s.with_noise = true;
            break;
        default:
            throw ValidationError("figure must be 1..5");
    }
    return s;
}

SweepResult run_fig1(const SweepSpec& spec) {
    Timer timer;
    spec.validate();
    const antenna::AntennaPattern pattern = make_pattern(spec);
    SweepResult result;
    result.axis_name = "d";
    result.axis = make_axis(spec);
    result.metadata = base_metadata(spec, pattern);
    const int n = spec.axis_points;

    struct Family {
        double alpha;
        bool limit;
        Fading fading;
        double freq;
        const char* tag;
    };
    const Family families[] = {
        {2.0, true, Fading::NoFading, 60e9, "alpha2_nofading"},
        {3.0, false, Fading::Rayleigh, 2.4e9, "alpha3_rayleigh"},
        {4.0, false, Fading::Rayleigh, 2.4e9, "alpha4_rayleigh"},
    };

    int family_idx = 0;
    for (const Family& fam : families) {
        RadarParams p = spec.params;
        p.alpha = fam.alpha;
        p.alpha_limit = fam.limit;
        p.fading = fam.fading;
        p.freq = fam.freq;

        if (has_method(spec, Method::Analytic)) {
            SweepColumn col = make_column(std::string("pd_analytic_") + fam.tag, n, false);
            for (int i = 0; i < n; ++i) col.values[i] = analytic_pd(result.axis[i], p);
            result.columns.push_back(std::move(col));
        }
        if (has_method(spec, Method::McAggregate)) {
            mc::McConfig cal_cfg;
            cal_cfg.seed = rng::derive(spec.seed, rng::kTagGeneric, 1000 + family_idx);
            cal_cfg.threads = spec.threads;
            const mc::InterferenceSamples samples =
                mc::collect_interference(p, pattern, spec.cal_samples, cal_cfg);
            const double theta = mc::calibrate_threshold(samples.aggregate, p);
            SweepColumn col = make_column(std::string("pd_mc_aggregate_") + fam.tag, n, true);
            for (int i : mc_mark_indices(n, spec.mc_points)) {
                mc::McConfig cfg;
                cfg.seed = rng::derive(spec.seed, rng::kTagGeneric,
                                       10000 * (family_idx + 1) + i);
                cfg.threads = spec.threads;
                const mc::Estimate e =
                    mc::estimate_pd(result.axis[i], theta, p, pattern, spec.pd_trials, cfg);
                col.values[i] = e.value;
                col.ci_low[i] = e.ci_low;
                col.ci_high[i] = e.ci_high;
            }
            result.columns.push_back(std::move(col));
        }
        ++family_idx;
    }
    add_window_metadata(result.metadata, spec.params);
    result.metadata["runtime_s"] = timer.seconds();
    return result;
}

SweepResult run_fig2(const SweepSpec& spec) {
    Timer timer;
    spec.validate();
    SweepResult result;
    result.axis_name = "lambda";
    result.axis = make_axis(spec);
    const int n = spec.axis_points;

    const double beamwidths[] = {M_PI / 6.0, M_PI / 3.0, 2.0 * M_PI};
    for (double phi : beamwidths) {
        char name[64];
        std::snprintf(name, sizeof name, "dm_analytic_phi%.0f", units::rad_to_deg(phi));
        SweepColumn col = make_column(name, n, false);
        for (int i = 0; i < n; ++i) {
            RadarParams p = spec.params;
            p.phi = phi;
            p.lambda = result.axis[i];
            col.values[i] = analytic::max_range_no_fading(p);
        }
        result.columns.push_back(std::move(col));
    }

    const antenna::AntennaPattern cone = antenna::AntennaPattern::cone(spec.params.phi);
    const antenna::AntennaPattern array = antenna::AntennaPattern::planar_array(
        spec.array.elements_per_side, spec.array.spacing_wavelengths, spec.array.sidelobe_floor_db);
    result.metadata = base_metadata(spec, cone);
    result.metadata["pattern_array"] = pattern_metadata(array);

    if (has_method(spec, Method::McAggregate)) {
        SweepColumn col_cone = make_column("dm_mc_cone", n, true);
        SweepColumn col_array = make_column("dm_mc_array", n, true);
        for (int i = 0; i < n; ++i) {
            RadarParams p = spec.params;
            p.lambda = result.axis[i];
            const mc::Estimate ec =
                mc_max_range(p, cone, spec, rng::derive(spec.seed, rng::kTagGeneric, 2000 + i), false);
            col_cone.values[i] = ec.value;
            col_cone.ci_low[i] = ec.ci_low;
            col_cone.ci_high[i] = ec.ci_high;
            const mc::Estimate ea =
                mc_max_range(p, array, spec, rng::derive(spec.seed, rng::kTagGeneric, 3000 + i), false);
            col_array.values[i] = ea.value;
            col_array.ci_low[i] = ea.ci_low;
            col_array.ci_high[i] = ea.ci_high;
        }
        result.columns.push_back(std::move(col_cone));
        result.columns.push_back(std::move(col_array));
    }
    add_window_metadata(result.metadata, spec.params);
    result.metadata["runtime_s"] = timer.seconds();
    return result;
}

SweepResult run_fig3(const SweepSpec& spec) {
    Timer timer;
    spec.validate();
    const antenna::AntennaPattern unused = make_pattern(spec);
    SweepResult result;
    result.axis_name = "phi";
    result.axis = make_axis(spec);
    result.metadata = base_metadata(spec, unused);
    result.metadata["notes"].push_back(
        "false-alarm targets 0.1/0.01/0.001 are tool defaults, not source values");
    const int n = spec.axis_points;

    const double pfas[] = {0.1, 0.01, 0.001};
    for (double pfa : pfas) {
        char name[64];
        std::snprintf(name, sizeof name, "dm_analytic_pfa%g", pfa);
        SweepColumn col = make_column(name, n, false);
        for (int i = 0; i < n; ++i) {
            RadarParams p = spec.params;
            p.phi = result.axis[i];
            p.pfa = pfa;
            col.values[i] = analytic::max_range_no_fading(p);
        }
        result.columns.push_back(std::move(col));
    }

    if (has_method(spec, Method::McAggregate)) {
        // MC markers only for false-alarm targets whose per-slot quantile can
        // be calibrated within the sample budget.
        std::vector<double> eligible;
        for (double pfa : pfas) {
            RadarParams p = spec.params;
            p.pfa = pfa;
            const double q = analytic::per_slot_quantile(p);
            if (100.0 / (1.0 - q) <= static_cast<double>(spec.cal_samples)) eligible.push_back(pfa);
            else {
                char note[128];
                std::snprintf(note, sizeof note,
                              "mc skipped for pfa=%g: calibration needs %.3g samples, budget %lld",
                              pfa, 100.0 / (1.0 - q),
                              static_cast<long long>(spec.cal_samples));
                result.metadata["notes"].push_back(note);
            }
        }
        std::vector<SweepColumn> mc_cols;
        for (double pfa : eligible) {
            char name[64];
            std::snprintf(name, sizeof name, "dm_mc_pfa%g", pfa);
            mc_cols.push_back(make_column(name, n, true));
        }
        for (int i = 0; i < n; ++i) {
            RadarParams base = spec.params;
            base.phi = result.axis[i];
            // One interference collection per beamwidth serves every
            // false-alarm target: only the calibrated quantile changes.
            mc::McConfig cfg;
            cfg.seed = rng::derive(spec.seed, rng::kTagGeneric, 100 + i);
            cfg.threads = spec.threads;
            const antenna::AntennaPattern pat = antenna::AntennaPattern::cone(base.phi);
            const mc::InterferenceSamples samples =
                mc::collect_interference(base, pat, spec.cal_samples, cfg);
            for (std::size_t k = 0; k < eligible.size(); ++k) {
                RadarParams p = base;
                p.pfa = eligible[k];
                const double theta = mc::calibrate_threshold(samples.aggregate, p);
                const mc::Estimate e = mc::estimate_max_range(theta, p, pat, cfg, spec.level,
                                                              spec.dm_trials, false);
                mc_cols[k].values[i] = e.value;
                mc_cols[k].ci_low[i] = e.ci_low;
                mc_cols[k].ci_high[i] = e.ci_high;
            }
        }
        for (auto& c : mc_cols) result.columns.push_back(std::move(c));
    }
    result.metadata["runtime_s"] = timer.seconds();
    return result;
}

SweepResult run_fig4(const SweepSpec& spec) {
    Timer timer;
    spec.validate();
    const antenna::AntennaPattern pattern = make_pattern(spec);
    SweepResult result;
    result.axis_name = "pfa";
    result.axis = make_axis(spec);
    result.metadata = base_metadata(spec, pattern);
    result.metadata["notes"].push_back(
        "target distances 10 m and 20 m are tool defaults, not source values");
    const int n = spec.axis_points;

    const double lambdas[] = {1e-5, 1e-4};
    const double distances[] = {10.0, 20.0};
    for (double lam : lambdas) {
        for (double d : distances) {
            char name[64];
            std::snprintf(name, sizeof name, "pd_analytic_lambda%g_d%g", lam, d);
            SweepColumn col = make_column(name, n, false);
            for (int i = 0; i < n; ++i) {
                RadarParams p = spec.params;
                p.lambda = lam;
                p.pfa = result.axis[i];
                col.values[i] = analytic::detection_probability_rayleigh(d, p);
            }
            result.columns.push_back(std::move(col));
        }
    }
    result.metadata["runtime_s"] = timer.seconds();
    return result;
}

SweepResult run_fig5(const SweepSpec& spec) {
    Timer timer;
    spec.validate();
    const antenna::AntennaPattern pattern = make_pattern(spec);
    SweepResult result;
    result.axis_name = "lambda";
    result.axis = make_axis(spec);
    result.metadata = base_metadata(spec, pattern);
    const int n = spec.axis_points;

    SweepColumn interference = make_column("dm_interference_only", n, false);
    SweepColumn mixed = make_column("dm_noise_interference", n, false);
    SweepColumn noise_only = make_column("dm_noise_only", n, false);
    for (int i = 0; i < n; ++i) {
        RadarParams p = spec.params;
        p.lambda = result.axis[i];
        interference.values[i] = analytic::max_range_no_fading(p);
        mixed.values[i] = analytic::max_range_with_noise(p, spec.noise);
        noise_only.values[i] = analytic::max_range_noise_only(p, spec.noise);
    }
    result.columns.push_back(std::move(interference));
    result.columns.push_back(std::move(mixed));
    result.columns.push_back(std::move(noise_only));
    result.metadata["runtime_s"] = timer.seconds();
    return result;
}

SweepResult run_figure(int which, const SweepSpec& spec) {
    switch (which) {
        case 1: return run_fig1(spec);
        case 2: return run_fig2(spec);
        case 3: return run_fig3(spec);
        case 4: return run_fig4(spec);
        case 5: return run_fig5(spec);
        default: throw ValidationError("figure must be 1..5");
    }
}

// ---------------------------------------------------------------------------
// output

void write_csv(const SweepResult& result, std::ostream& os) {
    json meta = result.metadata;
    meta.erase("runtime_s");  // keep the timestamp as the only volatile field
    os << "# " << meta.dump() << "\n";
    os << result.axis_name;
    for (const auto& c : result.columns) {
        os << "," << c.name;
        if (c.has_ci) os << "," << c.name << "_ci_lo," << c.name << "_ci_hi";
    }
    os << "\n";
    const auto cell = [&os](double v) {
        if (std::isfinite(v)) os << fmt_double(v);
    };
    for (Eigen::Index i = 0; i < result.axis.size(); ++i) {
        os << fmt_double(result.axis[i]);
        for (const auto& c : result.columns) {
            os << ",";
            cell(c.values[i]);
            if (c.has_ci) {
                os << ",";
                cell(c.ci_low[i]);
                os << ",";
                cell(c.ci_high[i]);
            }
        }
        os << "\n";
    }
}

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot open output file: " + path);
    write_csv(result, f);
}

void write_json(const SweepResult& result, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot open output file: " + path);
    json doc;
    json meta = result.metadata;
    meta.erase("runtime_s");
    doc["metadata"] = meta;
    doc["axis_name"] = result.axis_name;
    doc["axis"] = std::vector<double>(result.axis.data(), result.axis.data() + result.axis.size());
    json cols = json::array();
    for (const auto& c : result.columns) {
        json jc;
        jc["name"] = c.name;
        jc["values"] = std::vector<double>(c.values.data(), c.values.data() + c.values.size());
        if (c.has_ci) {
            jc["ci_low"] = std::vector<double>(c.ci_low.data(), c.ci_low.data() + c.ci_low.size());
            jc["ci_high"] =
                std::vector<double>(c.ci_high.data(), c.ci_high.data() + c.ci_high.size());
        }
        cols.push_back(jc);
    }
    doc["columns"] = cols;
    f << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// spec files and manifests

SweepSpec parse_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open spec file: " + path);

    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        const auto b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };

    SweepSpec spec;
    std::vector<std::string> unknown;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            unknown.push_back(line);
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "figure") spec.figure = std::stoi(val);
            else if (key == "axis") spec.axis = axis_from_string(val);
            else if (key == "axis_min") spec.axis_min = std::stod(val);
            else if (key == "axis_max") spec.axis_max = std::stod(val);
            else if (key == "axis_points") spec.axis_points = std::stoi(val);
            else if (key == "axis_scale") spec.log_axis = (val == "log");
            else if (key == "quantity") spec.quantity = quantity_from_string(val);
            else if (key == "methods") {
                spec.methods.clear();
                std::stringstream ss(val);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    spec.methods.push_back(method_from_string(trim(tok)));
            } else if (key == "pattern") spec.pattern = pattern_from_string(val);
            else if (key == "array_elements") spec.array.elements_per_side = std::stoi(val);
            else if (key == "array_spacing") spec.array.spacing_wavelengths = std::stod(val);
            else if (key == "array_floor_db") spec.array.sidelobe_floor_db = std::stod(val);
            else if (key == "lambda") spec.params.lambda = std::stod(val);
            else if (key == "m") spec.params.m = std::stoi(val);
            else if (key == "phi") spec.params.phi = std::stod(val);
            else if (key == "phi_deg") spec.params.phi = units::deg_to_rad(std::stod(val));
            else if (key == "alpha") spec.params.alpha = std::stod(val);
            else if (key == "alpha_limit") spec.params.alpha_limit = (val == "1" || val == "true");
            else if (key == "pt") spec.params.pt = std::stod(val);
            else if (key == "pt_dbm") spec.params.pt = units::dbm_to_watt(std::stod(val));
            else if (key == "freq") spec.params.freq = std::stod(val);
            else if (key == "freq_ghz") spec.params.freq = units::ghz_to_hz(std::stod(val));
            else if (key == "kappa") spec.params.kappa = std::stod(val);
            else if (key == "sigma") spec.params.sigma = std::stod(val);
            else if (key == "pfa") spec.params.pfa = std::stod(val);
            else if (key == "fading") spec.params.fading = fading_from_string(val);
            else if (key == "with_noise") spec.with_noise = (val == "1" || val == "true");
            else if (key == "temp") spec.noise.temp = std::stod(val);
            else if (key == "bandwidth") spec.noise.bandwidth = std::stod(val);
            else if (key == "bandwidth_mhz") spec.noise.bandwidth = units::mhz_to_hz(std::stod(val));
            else if (key == "noise_figure") spec.noise.noise_figure = std::stod(val);
            else if (key == "d") spec.target_distance = std::stod(val);
            else if (key == "seed") spec.seed = std::stoull(val);
            else if (key == "threads") spec.threads = std::stoi(val);
            else if (key == "cal_samples") spec.cal_samples = std::stoll(val);
            else if (key == "pd_trials") spec.pd_trials = std::stoll(val);
            else if (key == "dm_trials") spec.dm_trials = std::stoll(val);
            else if (key == "mc_points") spec.mc_points = std::stoi(val);
            else if (key == "level") spec.level = std::stod(val);
            else if (key == "out") spec.out_path = val;
            else unknown.push_back(key);
        } catch (const std::invalid_argument&) {
            throw ValidationError("spec file: cannot parse value for key '" + key + "': " + val);
        }
    }
    if (!unknown.empty()) {
        std::ostringstream os;
        os << "spec file has unknown keys:";
        for (const auto& k : unknown) os << " '" << k << "'";
        throw ValidationError(os.str());
    }
    return spec;
}

SweepSpec spec_from_manifest_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open manifest: " + path);
    json meta;
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        json doc = json::parse(f);
        meta = doc.at("metadata");
    } else {
        std::string line;
        std::getline(f, line);
        if (line.rfind("# ", 0) != 0)
            throw ValidationError("manifest CSV does not start with a '# ' metadata line: " + path);
        meta = json::parse(line.substr(2));
    }
    return SweepSpec::from_json(meta.at("spec"));
}

std::string default_out_dir() {
    const char* env = std::getenv("RADARFIELD_OUT_DIR");
    return env && *env ? env : ".";
}

}  // namespace radarfield::experiments
