#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "emlab/fields.hpp"
#include "emlab/grid.hpp"
#include "emlab/langevin.hpp"
#include "emlab/spacetime_metric.hpp"

namespace emlab {

inline constexpr const char* kCodeVersion = "emlab 0.1.0";

enum class ExperimentKind {
    langevin,
    fp,
    schrodinger,
    madelung,
    compare_quantum,
    build_metric,
    geodesic,
    action,
    einstein_check,
    tune,
};

ExperimentKind experiment_kind(const std::string& name);
std::string to_string(ExperimentKind k);

// ---------------------------------------------------------------------------
// Config blocks.  Every field has a default; parsing materializes defaults so
// parse -> serialize -> parse reproduces an identical object.

// Nodal potential; drives both the drift side (langevin, fp, where it plays
// the free energy) and the wave side (schrodinger, madelung).
//   zero         V = 0
//   harmonic     V = strength/2 * sum (q - center)^2
//   double-well  V = strength * sum ((q - center)^2 - depth)^2
//   cosine       V = strength * sum cos(waves * (q - center))
struct PotentialBlock {
    std::string kind = "zero";
    double strength = 1.0;
    double depth = 1.0;
    double waves = 1.0;
    std::vector<double> center;  // per axis, defaults to zeros

    bool operator==(const PotentialBlock&) const = default;
};

struct DynamicsBlock {
    double gamma = 1.0;
    double diffusion = 0.25;
    double dt = 0.0;  // <= 0 lets solvers with a stability bound pick it
    double duration = 0.0;
    long n_steps = 0;
    int n_replicas = 1;
    long snapshot_every = 0;  // 0 keeps only first and last
    double bandwidth = 0.0;   // kernel width of the empirical density

    bool operator==(const DynamicsBlock&) const = default;
};

struct QuantumBlock {
    double alpha = 2.0;
    int mu_sign = 1;

    bool operator==(const QuantumBlock&) const = default;
};

// Initial state.  `shape` is "uniform" or "gaussian" (drift kinds default to
// uniform, wave kinds require gaussian).  `velocity` is the initial flow
// velocity of the packet; wave kinds only accept it on non-periodic grids.
struct InitialBlock {
    std::string shape = "gaussian";
    std::vector<double> center;
    std::vector<double> width;
    std::vector<double> velocity;

    bool operator==(const InitialBlock&) const = default;
};

struct MetricBlock {
    std::string kind = "flat";  // flat | frw | weak-field | conformal | slab
    Grid4 grid;
    double epsilon = 0.05;   // weak-field amplitude
    int modes = 6;           // weak-field mode count
    int max_wavenumber = 1;  // weak-field integer wavenumber cap
    bool time_dependent = false;
    double c = 0.05;  // conformal / slab strength
    double lambda = 0.0;
    double n_bar = 0.0;
    bool n_bar_is_volume = true;

    bool operator==(const MetricBlock&) const = default;
};

struct EnsembleBlock {
    std::string file;  // when set, neurons come from this JSON file
    int n = 64;
    double epsilon = 0.05;
    double box_half = 1.0;

    bool operator==(const EnsembleBlock&) const = default;
};

struct FieldGridBlock {
    std::vector<double> min{-8.0, -8.0, -8.0};
    std::vector<double> max{8.0, 8.0, 8.0};
    std::vector<int> res{48, 48, 48};
    double time = 0.0;

    bool operator==(const FieldGridBlock&) const = default;
};

struct SweepBlock {
    std::vector<double> epsilons;

    bool operator==(const SweepBlock&) const = default;
};

struct InteractionBlock {
    long n_samples = 0;

    bool operator==(const InteractionBlock&) const = default;
};

struct GeodesicBlock {
    std::vector<double> x0{0.0, 0.0, 0.0, 0.0};
    std::vector<double> v0{0.0, 0.0, 0.0};
    double duration = 1.0;
    double dt = 0.01;
    bool proper = false;
    int perturbations = 0;
    double amplitude = 0.05;

    bool operator==(const GeodesicBlock&) const = default;
};

struct ProbesBlock {
    int count = 8;
    double delta = 1e-5;

    bool operator==(const ProbesBlock&) const = default;
};

struct TuneBlock {
    double target_hbar = 1.0;
    std::string knob = "diffusion";  // gamma | diffusion

    bool operator==(const TuneBlock&) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::fp;
    std::uint64_t seed = 1;
    std::string output;  // default artifact directory; --out overrides

    GridSpec grid;
    PotentialBlock potential;
    DynamicsBlock dynamics;
    QuantumBlock quantum;
    InitialBlock initial;
    MetricBlock metric;
    EnsembleBlock ensemble;
    FieldGridBlock field_grid;
    SweepBlock sweep;
    InteractionBlock interaction;
    GeodesicBlock geodesic;
    ProbesBlock probes;
    TuneBlock tune;
    bool write_field = false;
    bool refine = true;  // compare-quantum: also run at half resolution

    // Pass/fail thresholds, fully materialized from per-kind defaults.
    std::map<std::string, double> tolerances;

    bool operator==(const ExperimentConfig&) const = default;
};

// Documented defaults; parse starts from these and overlays the config.
std::map<std::string, double> default_tolerances(ExperimentKind k);

// Throws ConfigError (with a dotted field path) on any schema violation:
// unknown keys, wrong types, missing required fields, inconsistent sizes,
// missing referenced files, or a missing seed on a stochastic experiment.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON with sorted keys and materialized defaults.
std::string serialize_config(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Analytic potential and its gradient (one replica vector in, gradient out).
PotentialSpec make_potential(const PotentialBlock& pb, int dim);
GradFn make_potential_gradient(const PotentialBlock& pb, int dim);

// Metric injector selected by the block; `seed` feeds the weak-field modes.
SpacetimeMetric metric_from_block(const MetricBlock& mb, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Run records.

struct CriterionResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string comparison = "lt";  // lt | le | ge
    bool passed = false;
};

struct RunRecord {
    std::string experiment;
    std::string code_version;
    std::string config_hash;  // hex of the canonical config bytes
    std::uint64_t seed = 0;
    int threads = 1;
    bool reference = false;
    double wall_time_seconds = 0.0;  // the only field that varies across
                                     // identical runs
    std::vector<CriterionResult> criteria;
    std::map<std::string, double> measurements;
    std::vector<std::string> artifacts;         // relative to the record
    std::map<std::string, std::string> series;  // series name -> artifact
    ExperimentConfig config;

    bool passed() const;
};

struct RunOptions {
    std::string out_dir;  // empty: config.output, else runs/<kind>
    int threads = 1;
    bool reference = false;  // force the single-threaded bit-exact mode
};

// Executes the experiment, writes every artifact plus runrecord.json under
// the output directory, and returns the record.  Numeric trouble surfaces as
// the library exceptions; criteria failures do not throw (inspect passed()).
RunRecord run_experiment(const ExperimentConfig& cfg,
                         const RunOptions& opt = {});

std::string serialize_runrecord(const RunRecord& rec);
RunRecord load_runrecord(const std::string& path);

// Streams the named series' tidy CSV.  Unknown names throw ConfigError
// listing the available series.
void emit_series(const std::string& runrecord_path, const std::string& series,
                 std::ostream& out);

}  // namespace emlab
