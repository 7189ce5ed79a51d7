#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "radarfield/antenna.hpp"
#include "radarfield/params.hpp"
#include "radarfield/rng.hpp"

// Sampling of the marked Poisson radar field: interferer positions,
// boresight orientations, transmit-slot marks and per-slot fading, with a
// principled truncation window around the typical node at the origin.

namespace radarfield::field {

inline constexpr double kDefaultPointCap = 1e8;
inline constexpr double kWindowPowerEpsilon = 1e-3;

/// How the simulation window radius was chosen: the smallest radius at
/// which a boresight-aligned, unit-fading interferer still delivers less
/// than kWindowPowerEpsilon times the threshold scale (`power_radius`),
/// floored at ten mean aligned-active interferer spacings
/// (`spacing_radius`). `spacing_binds` records which rule won; at the
/// baseline parameters it is the spacing floor.
struct WindowInfo {
    double radius = 0.0;
    double power_radius = 0.0;
    double spacing_radius = 0.0;
    bool spacing_binds = false;
};

WindowInfo window_radius_info(const RadarParams& p, double theta_scale);
double window_radius(const RadarParams& p, double theta_scale);

/// Expected number of field points in a window of the given radius.
double expected_point_count(const RadarParams& p, double radius);

/// One realised field. Points are stored grouped by transmit-slot mark
/// (bucket_offsets has m+1 entries delimiting each mark's range), since a
/// point only ever contributes interference during its own mark's slot.
/// Per-point fading stream ids are implicit: point index within the scene
/// plus the scene key.
struct Scene {
    RadarParams params;
    double radius = 0.0;
    std::uint64_t scene_key = 0;
    std::vector<std::int64_t> bucket_offsets;
    Eigen::ArrayXd x, y, boresight;

    std::int64_t size() const { return x.size(); }
    std::int64_t bucket_begin(int mark) const { return bucket_offsets[mark]; }
    std::int64_t bucket_end(int mark) const { return bucket_offsets[mark + 1]; }
    int mark_of(std::int64_t index) const;
};

/// Draws a scene: Poisson point count, uniform positions on the disk,
/// uniform boresights, uniform slot marks. Deterministic given
/// (scene_key, params, radius). Throws ResourceError if the expected
/// point count exceeds point_cap.
Scene sample_scene(const RadarParams& p, double radius, std::uint64_t scene_key,
                   double point_cap = kDefaultPointCap);

/// Aggregate and strongest-component received power at the origin over one
/// slot. active_count counts interferers with a strictly positive
/// contribution, so aggregate == 0 iff active_count == 0 and
/// strongest == aggregate whenever active_count <= 1.
struct InterferenceSample {
    double aggregate = 0.0;
    double strongest = 0.0;
    std::int64_t active_count = 0;
};

/// Evaluates one slot of a materialised scene. Fading draws (Rayleigh
/// only) come from `fading`, consumed in bucket order for links with a
/// nonzero gain product.
InterferenceSample interference_slot(const Scene& scene, int slot,
                                     const antenna::AntennaPattern& pattern, double rx_boresight,
                                     rng::Stream& fading);

/// Same, with the fading stream derived internally from
/// (scene_key, slot) -- the convention the bulk samplers use.
InterferenceSample interference_slot(const Scene& scene, int slot,
                                     const antenna::AntennaPattern& pattern, double rx_boresight);

/// Bulk path: generates the scene bucket-by-bucket (identical draw order
/// and fading-stream keys as sample_scene + interference_slot, so the two
/// routes produce bit-identical samples) and hands each slot's sample to
/// the sink without materialising the whole scene. Slots are visited in
/// order 0..m-1.
void for_each_slot_sample(const RadarParams& p, double radius,
                          const antenna::AntennaPattern& pattern, double rx_boresight,
                          std::uint64_t scene_key,
                          const std::function<void(int slot, const InterferenceSample&)>& sink,
                          double point_cap = kDefaultPointCap);

}  // namespace radarfield::field
