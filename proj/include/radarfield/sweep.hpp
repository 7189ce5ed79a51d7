#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "radarfield/antenna.hpp"
#include "radarfield/params.hpp"

// Sweep orchestration: the five canonical result tables (detection
// probability vs distance, max range vs density / beamwidth, ROC, and the
// noise-limited density study) plus free-form single-axis sweeps. Output
// is CSV with a '#'-prefixed JSON metadata header that is sufficient to
// re-run the sweep bit-identically.

namespace radarfield::experiments {

enum class Axis { Distance, Lambda, Phi, Pfa };
enum class Method { Analytic, McStrongest, McAggregate };
enum class PatternKind { Cone, PlanarArray };
enum class Quantity { Auto, DetectionProbability, MaxRange };

const char* to_string(Axis a);
const char* to_string(Method m);
const char* to_string(PatternKind k);
const char* to_string(Quantity q);

struct ArraySpec {
    int elements_per_side = 4;
    double spacing_wavelengths = 0.5;
    double sidelobe_floor_db = -10.0;
};

struct SweepSpec {
    int figure = 0;  ///< 1..5 for canonical figures, 0 for custom sweeps
    Axis axis = Axis::Lambda;
    double axis_min = 1e-6;
    double axis_max = 1e-3;
    int axis_points = 7;
    bool log_axis = true;
    Quantity quantity = Quantity::Auto;
    std::vector<Method> methods{Method::Analytic};
    PatternKind pattern = PatternKind::Cone;
    ArraySpec array;
    RadarParams params;
    bool with_noise = false;
    NoiseParams noise;
    double target_distance = 10.0;  ///< fixed target range for pd sweeps off the d axis [m]
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_path;

    // Monte Carlo budgets (per point / per curve).
    std::int64_t cal_samples = 100000;  ///< interference samples per calibration
    std::int64_t pd_trials = 10000;     ///< detection trials per MC marker
    std::int64_t dm_trials = 2000;      ///< detection trials per range-bisection step
    int mc_points = 8;                  ///< MC markers per curve on Pd sweeps
    double level = 0.5;                 ///< Pd level defining the MC max range

    void validate() const;
    nlohmann::json to_json() const;
    static SweepSpec from_json(const nlohmann::json& j);
};

struct SweepColumn {
    std::string name;
    Eigen::ArrayXd values;   // NaN where a method was not evaluated
    Eigen::ArrayXd ci_low;   // only meaningful when has_ci
    Eigen::ArrayXd ci_high;
    bool has_ci = false;
};

struct SweepResult {
    std::string axis_name;
    Eigen::ArrayXd axis;
    std::vector<SweepColumn> columns;
    nlohmann::json metadata;

    const SweepColumn* find(const std::string& name) const;
};

/// Figure presets; apply CLI/config overrides on top of the returned spec.
SweepSpec figure_defaults(int which);

SweepResult run_fig1(const SweepSpec& spec);
SweepResult run_fig2(const SweepSpec& spec);
SweepResult run_fig3(const SweepSpec& spec);
SweepResult run_fig4(const SweepSpec& spec);
SweepResult run_fig5(const SweepSpec& spec);
SweepResult run_figure(int which, const SweepSpec& spec);
SweepResult run_custom(const SweepSpec& spec);

/// CSV with the metadata header line; numbers at full round-trip
/// precision, absent cells empty. The only volatile field is the
/// metadata timestamp.
void write_csv(const SweepResult& result, std::ostream& os);
void write_csv(const SweepResult& result, const std::string& path);

/// Companion JSON document (same metadata, columnar data).
void write_json(const SweepResult& result, const std::string& path);

/// Flat key=value sweep description ('#' comments allowed). Unknown keys
/// raise ValidationError naming them.
SweepSpec parse_spec_file(const std::string& path);

/// Recovers the spec from a previously written CSV/JSON manifest so a run
/// can be reproduced exactly.
SweepSpec spec_from_manifest_file(const std::string& path);

/// Default output directory: $RADARFIELD_OUT_DIR or ".".
std::string default_out_dir();

antenna::AntennaPattern make_pattern(const SweepSpec& spec);

}  // namespace radarfield::experiments
