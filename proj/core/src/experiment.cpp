#include "emlab/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "emlab/christoffel.hpp"
#include "emlab/curvature.hpp"
#include "emlab/errors.hpp"
#include "emlab/fokker_planck.hpp"
#include "emlab/geodesic.hpp"
#include "emlab/interaction.hpp"
#include "emlab/madelung.hpp"
#include "emlab/quantum_algebra.hpp"
#include "emlab/rng.hpp"
#include "emlab/schrodinger.hpp"
#include "emlab/spacetime_field.hpp"
#include "emlab/wavemap.hpp"

namespace emlab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// --------------------------------------------------------------------------
// JSON access with dotted field paths.

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path, msg);
}

void check_keys(const json& j, const std::string& path,
                const std::vector<const char*>& allowed) {
    for (const auto& item : j.items()) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* a) { return item.key() == a; });
        if (!known) fail(join_path(path, item.key()), "unknown field");
    }
}

const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
    const json* f = find(j, key);
    if (!f) fail(join_path(path, key), "missing required field");
    return *f;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> as_number_vector(const json& j, const std::string& path,
                                     std::size_t need = 0) {
    if (!j.is_array()) fail(path, "expected an array");
    if (need != 0 && j.size() != need)
        fail(path, "expected " + std::to_string(need) + " entries");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(
            as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<int> as_int_vector(const json& j, const std::string& path,
                               std::size_t need = 0) {
    if (!j.is_array()) fail(path, "expected an array");
    if (need != 0 && j.size() != need)
        fail(path, "expected " + std::to_string(need) + " entries");
    std::vector<int> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(static_cast<int>(
            as_integer(j[i], path + "[" + std::to_string(i) + "]")));
    return out;
}

std::vector<bool> as_bool_vector(const json& j, const std::string& path,
                                 std::size_t need) {
    if (!j.is_array()) fail(path, "expected an array");
    if (j.size() != need)
        fail(path, "expected " + std::to_string(need) + " entries");
    std::vector<bool> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_bool(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

double get_number(const json& j, const std::string& path, const char* key,
                  double def) {
    const json* f = find(j, key);
    return f ? as_number(*f, join_path(path, key)) : def;
}

long get_integer(const json& j, const std::string& path, const char* key,
                 long def) {
    const json* f = find(j, key);
    return f ? as_integer(*f, join_path(path, key)) : def;
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool def) {
    const json* f = find(j, key);
    return f ? as_bool(*f, join_path(path, key)) : def;
}

std::string get_string(const json& j, const std::string& path,
                       const char* key, const std::string& def) {
    const json* f = find(j, key);
    return f ? as_string(*f, join_path(path, key)) : def;
}

// --------------------------------------------------------------------------
// Block parsers.

GridSpec parse_gridspec(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"min", "max", "res", "boundary"});
    const auto res = as_int_vector(require(j, path, "res"), path + ".res");
    if (res.size() < 1 || res.size() > 2)
        fail(path + ".res", "expected 1 or 2 entries");
    GridSpec g;
    g.dim = static_cast<int>(res.size());
    const auto mn = as_number_vector(require(j, path, "min"), path + ".min",
                                     res.size());
    const auto mx = as_number_vector(require(j, path, "max"), path + ".max",
                                     res.size());
    for (int a = 0; a < g.dim; ++a) {
        g.min[a] = mn[a];
        g.max[a] = mx[a];
        g.res[a] = res[a];
    }
    const std::string b = get_string(j, path, "boundary", "reflecting");
    if (b == "periodic")
        g.boundary = Boundary::periodic;
    else if (b == "reflecting")
        g.boundary = Boundary::reflecting;
    else
        fail(path + ".boundary", "expected 'periodic' or 'reflecting'");
    try {
        g.validate();
    } catch (const Error& e) {
        fail(path, e.what());
    }
    return g;
}

json gridspec_json(const GridSpec& g) {
    json j;
    json mn = json::array(), mx = json::array(), rs = json::array();
    for (int a = 0; a < g.dim; ++a) {
        mn.push_back(g.min[a]);
        mx.push_back(g.max[a]);
        rs.push_back(g.res[a]);
    }
    j["min"] = mn;
    j["max"] = mx;
    j["res"] = rs;
    j["boundary"] =
        g.boundary == Boundary::periodic ? "periodic" : "reflecting";
    return j;
}

PotentialBlock parse_potential(const json& j, const std::string& path,
                               int dim) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"kind", "strength", "depth", "waves", "center"});
    PotentialBlock pb;
    pb.kind = get_string(j, path, "kind", "zero");
    if (pb.kind != "zero" && pb.kind != "harmonic" &&
        pb.kind != "double-well" && pb.kind != "cosine")
        fail(path + ".kind", "unknown potential kind '" + pb.kind + "'");
    pb.strength = get_number(j, path, "strength", 1.0);
    pb.depth = get_number(j, path, "depth", 1.0);
    pb.waves = get_number(j, path, "waves", 1.0);
    if (const json* c = find(j, "center"))
        pb.center = as_number_vector(*c, path + ".center",
                                     static_cast<std::size_t>(dim));
    else
        pb.center.assign(dim, 0.0);
    return pb;
}

json potential_json(const PotentialBlock& pb) {
    json j;
    j["kind"] = pb.kind;
    j["strength"] = pb.strength;
    j["depth"] = pb.depth;
    j["waves"] = pb.waves;
    j["center"] = pb.center;
    return j;
}

DynamicsBlock parse_dynamics(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path,
               {"gamma", "diffusion", "dt", "duration", "n_steps",
                "n_replicas", "snapshot_every", "bandwidth"});
    DynamicsBlock d;
    d.gamma = get_number(j, path, "gamma", d.gamma);
    d.diffusion = get_number(j, path, "diffusion", d.diffusion);
    d.dt = get_number(j, path, "dt", d.dt);
    d.duration = get_number(j, path, "duration", d.duration);
    d.n_steps = get_integer(j, path, "n_steps", d.n_steps);
    d.n_replicas =
        static_cast<int>(get_integer(j, path, "n_replicas", d.n_replicas));
    d.snapshot_every = get_integer(j, path, "snapshot_every", d.snapshot_every);
    d.bandwidth = get_number(j, path, "bandwidth", d.bandwidth);
    return d;
}

json dynamics_json(const DynamicsBlock& d) {
    json j;
    j["gamma"] = d.gamma;
    j["diffusion"] = d.diffusion;
    j["dt"] = d.dt;
    j["duration"] = d.duration;
    j["n_steps"] = d.n_steps;
    j["n_replicas"] = d.n_replicas;
    j["snapshot_every"] = d.snapshot_every;
    j["bandwidth"] = d.bandwidth;
    return j;
}

QuantumBlock parse_quantum(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"alpha", "mu_sign"});
    QuantumBlock q;
    q.alpha = get_number(j, path, "alpha", q.alpha);
    q.mu_sign = static_cast<int>(get_integer(j, path, "mu_sign", q.mu_sign));
    if (q.mu_sign != 1 && q.mu_sign != -1)
        fail(path + ".mu_sign", "expected +1 or -1");
    return q;
}

json quantum_json(const QuantumBlock& q) {
    json j;
    j["alpha"] = q.alpha;
    j["mu_sign"] = q.mu_sign;
    return j;
}

InitialBlock parse_initial(const json* j, const std::string& path, int dim,
                           const std::string& default_shape) {
    InitialBlock b;
    b.shape = default_shape;
    b.center.assign(dim, 0.0);
    b.width.assign(dim, 0.5);
    b.velocity.assign(dim, 0.0);
    if (!j) return b;
    if (!j->is_object()) fail(path, "expected an object");
    check_keys(*j, path, {"shape", "center", "width", "velocity"});
    b.shape = get_string(*j, path, "shape", default_shape);
    if (b.shape != "uniform" && b.shape != "gaussian")
        fail(path + ".shape", "expected 'uniform' or 'gaussian'");
    const std::size_t d = static_cast<std::size_t>(dim);
    if (const json* c = find(*j, "center"))
        b.center = as_number_vector(*c, path + ".center", d);
    if (const json* w = find(*j, "width"))
        b.width = as_number_vector(*w, path + ".width", d);
    if (const json* v = find(*j, "velocity"))
        b.velocity = as_number_vector(*v, path + ".velocity", d);
    for (std::size_t a = 0; a < b.width.size(); ++a)
        if (!(b.width[a] > 0.0))
            fail(path + ".width", "entries must be positive");
    return b;
}

json initial_json(const InitialBlock& b) {
    json j;
    j["shape"] = b.shape;
    j["center"] = b.center;
    j["width"] = b.width;
    j["velocity"] = b.velocity;
    return j;
}

Grid4 parse_grid4(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"min", "max", "res", "periodic"});
    Grid4 g;
    const auto mn = as_number_vector(require(j, path, "min"), path + ".min", 4);
    const auto mx = as_number_vector(require(j, path, "max"), path + ".max", 4);
    const auto rs = as_int_vector(require(j, path, "res"), path + ".res", 4);
    for (int a = 0; a < 4; ++a) {
        g.min[a] = mn[a];
        g.max[a] = mx[a];
        g.res[a] = rs[a];
    }
    if (const json* p = find(j, "periodic")) {
        const auto pv = as_bool_vector(*p, path + ".periodic", 4);
        for (int a = 0; a < 4; ++a) g.periodic[a] = pv[a];
    }
    try {
        g.validate();
    } catch (const Error& e) {
        fail(path, e.what());
    }
    return g;
}

json grid4_json(const Grid4& g) {
    json j;
    j["min"] = std::vector<double>(g.min, g.min + 4);
    j["max"] = std::vector<double>(g.max, g.max + 4);
    j["res"] = std::vector<int>(g.res, g.res + 4);
    j["periodic"] = std::vector<bool>(g.periodic, g.periodic + 4);
    return j;
}

MetricBlock parse_metric(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path,
               {"kind", "grid", "epsilon", "modes", "max_wavenumber",
                "time_dependent", "c", "lambda", "n_bar"});
    MetricBlock m;
    m.kind = get_string(j, path, "kind", "flat");
    if (m.kind != "flat" && m.kind != "frw" && m.kind != "weak-field" &&
        m.kind != "conformal" && m.kind != "slab")
        fail(path + ".kind", "unknown metric kind '" + m.kind + "'");
    if (const json* g = find(j, "grid")) m.grid = parse_grid4(*g, path + ".grid");
    m.epsilon = get_number(j, path, "epsilon", m.epsilon);
    m.modes = static_cast<int>(get_integer(j, path, "modes", m.modes));
    m.max_wavenumber = static_cast<int>(
        get_integer(j, path, "max_wavenumber", m.max_wavenumber));
    m.time_dependent = get_bool(j, path, "time_dependent", m.time_dependent);
    m.c = get_number(j, path, "c", m.c);
    m.lambda = get_number(j, path, "lambda", m.lambda);
    if (const json* nb = find(j, "n_bar")) {
        if (nb->is_string()) {
            if (nb->get<std::string>() != "volume")
                fail(path + ".n_bar", "expected a number or 'volume'");
            m.n_bar_is_volume = true;
            m.n_bar = 0.0;
        } else {
            m.n_bar = as_number(*nb, path + ".n_bar");
            m.n_bar_is_volume = false;
        }
    }
    if (m.kind == "weak-field") {
        if (!(m.epsilon >= 0.0) || m.epsilon >= 0.3)
            fail(path + ".epsilon",
                 "weak-field amplitude must lie in [0, 0.3)");
        if (m.modes < 1) fail(path + ".modes", "must be >= 1");
        if (m.max_wavenumber < 1)
            fail(path + ".max_wavenumber", "must be >= 1");
    }
    if (m.kind == "frw" &&
        (m.grid.periodic[0] || !(m.grid.min[0] > 0.0)))
        fail(path + ".grid",
             "frw needs a non-periodic time axis with min > 0");
    if (m.kind == "slab" &&
        (!(1.0 + 2.0 * m.c * m.grid.min[1] > 0.0) ||
         !(1.0 + 2.0 * m.c * m.grid.max[1] > 0.0)))
        fail(path + ".c", "slab factor 1 + 2 c x1 must stay positive");
    return m;
}

json metric_json(const MetricBlock& m) {
    json j;
    j["kind"] = m.kind;
    j["grid"] = grid4_json(m.grid);
    j["epsilon"] = m.epsilon;
    j["modes"] = m.modes;
    j["max_wavenumber"] = m.max_wavenumber;
    j["time_dependent"] = m.time_dependent;
    j["c"] = m.c;
    j["lambda"] = m.lambda;
    if (m.n_bar_is_volume)
        j["n_bar"] = "volume";
    else
        j["n_bar"] = m.n_bar;
    return j;
}

EnsembleBlock parse_ensemble(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"file", "n", "epsilon", "box_half"});
    EnsembleBlock e;
    e.file = get_string(j, path, "file", "");
    e.n = static_cast<int>(get_integer(j, path, "n", e.n));
    e.epsilon = get_number(j, path, "epsilon", e.epsilon);
    e.box_half = get_number(j, path, "box_half", e.box_half);
    if (e.n < 1) fail(path + ".n", "must be >= 1");
    if (!(e.epsilon >= 0.0)) fail(path + ".epsilon", "must be >= 0");
    if (!(e.box_half > 0.0)) fail(path + ".box_half", "must be > 0");
    if (!e.file.empty() && !fs::exists(e.file))
        fail(path + ".file", "file not found: " + e.file);
    return e;
}

json ensemble_json(const EnsembleBlock& e) {
    json j;
    j["file"] = e.file;
    j["n"] = e.n;
    j["epsilon"] = e.epsilon;
    j["box_half"] = e.box_half;
    return j;
}

FieldGridBlock parse_field_grid(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"min", "max", "res", "time"});
    FieldGridBlock b;
    if (const json* v = find(j, "min"))
        b.min = as_number_vector(*v, path + ".min", 3);
    if (const json* v = find(j, "max"))
        b.max = as_number_vector(*v, path + ".max", 3);
    if (const json* v = find(j, "res"))
        b.res = as_int_vector(*v, path + ".res", 3);
    b.time = get_number(j, path, "time", b.time);
    for (int a = 0; a < 3; ++a) {
        if (b.res[a] < 2) fail(path + ".res", "entries must be >= 2");
        if (!(b.min[a] < b.max[a])) fail(path, "min must be < max");
    }
    return b;
}

json field_grid_json(const FieldGridBlock& b) {
    json j;
    j["min"] = b.min;
    j["max"] = b.max;
    j["res"] = b.res;
    j["time"] = b.time;
    return j;
}

SpatialGrid to_spatial(const FieldGridBlock& b) {
    SpatialGrid g;
    for (int a = 0; a < 3; ++a) {
        g.min[a] = b.min[a];
        g.max[a] = b.max[a];
        g.res[a] = b.res[a];
    }
    g.time = b.time;
    return g;
}

SweepBlock parse_sweep(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"epsilons"});
    SweepBlock s;
    if (const json* e = find(j, "epsilons"))
        s.epsilons = as_number_vector(*e, path + ".epsilons");
    for (double e : s.epsilons)
        if (!(e > 0.0)) fail(path + ".epsilons", "entries must be > 0");
    return s;
}

InteractionBlock parse_interaction(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"n_samples"});
    InteractionBlock b;
    b.n_samples = get_integer(j, path, "n_samples", b.n_samples);
    if (b.n_samples < 0) fail(path + ".n_samples", "must be >= 0");
    return b;
}

GeodesicBlock parse_geodesic(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path,
               {"x0", "v0", "duration", "dt", "proper", "perturbations",
                "amplitude"});
    GeodesicBlock g;
    if (const json* v = find(j, "x0"))
        g.x0 = as_number_vector(*v, path + ".x0", 4);
    if (const json* v = find(j, "v0"))
        g.v0 = as_number_vector(*v, path + ".v0", 3);
    g.duration = get_number(j, path, "duration", g.duration);
    g.dt = get_number(j, path, "dt", g.dt);
    g.proper = get_bool(j, path, "proper", g.proper);
    g.perturbations =
        static_cast<int>(get_integer(j, path, "perturbations", g.perturbations));
    g.amplitude = get_number(j, path, "amplitude", g.amplitude);
    if (!(g.duration > 0.0)) fail(path + ".duration", "must be > 0");
    if (!(g.dt > 0.0)) fail(path + ".dt", "must be > 0");
    if (g.perturbations < 0) fail(path + ".perturbations", "must be >= 0");
    if (g.perturbations > 0 && !(g.amplitude > 0.0))
        fail(path + ".amplitude", "must be > 0 when perturbations are on");
    return g;
}

json geodesic_json(const GeodesicBlock& g) {
    json j;
    j["x0"] = g.x0;
    j["v0"] = g.v0;
    j["duration"] = g.duration;
    j["dt"] = g.dt;
    j["proper"] = g.proper;
    j["perturbations"] = g.perturbations;
    j["amplitude"] = g.amplitude;
    return j;
}

ProbesBlock parse_probes(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"count", "delta"});
    ProbesBlock p;
    p.count = static_cast<int>(get_integer(j, path, "count", p.count));
    p.delta = get_number(j, path, "delta", p.delta);
    if (p.count < 1) fail(path + ".count", "must be >= 1");
    if (!(p.delta > 0.0)) fail(path + ".delta", "must be > 0");
    return p;
}

json probes_json(const ProbesBlock& p) {
    json j;
    j["count"] = p.count;
    j["delta"] = p.delta;
    return j;
}

TuneBlock parse_tune(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"target_hbar", "knob"});
    TuneBlock t;
    t.target_hbar = get_number(j, path, "target_hbar", t.target_hbar);
    t.knob = get_string(j, path, "knob", t.knob);
    if (!(t.target_hbar > 0.0)) fail(path + ".target_hbar", "must be > 0");
    if (t.knob != "gamma" && t.knob != "diffusion")
        fail(path + ".knob", "expected 'gamma' or 'diffusion'");
    return t;
}

json tune_json(const TuneBlock& t) {
    json j;
    j["target_hbar"] = t.target_hbar;
    j["knob"] = t.knob;
    return j;
}

bool uses_solver_grid(ExperimentKind k) {
    return k == ExperimentKind::langevin || k == ExperimentKind::fp ||
           k == ExperimentKind::schrodinger || k == ExperimentKind::madelung ||
           k == ExperimentKind::compare_quantum;
}

bool uses_quantum(ExperimentKind k) {
    return k == ExperimentKind::schrodinger || k == ExperimentKind::madelung ||
           k == ExperimentKind::compare_quantum;
}

bool uses_metric(ExperimentKind k) {
    return k == ExperimentKind::geodesic || k == ExperimentKind::action ||
           k == ExperimentKind::einstein_check;
}

// Post-parse value checks shared by parse_config; every failure points at a
// config field so the CLI can exit with a schema error.
void validate_values(const ExperimentConfig& cfg) {
    const auto& d = cfg.dynamics;
    const ExperimentKind k = cfg.kind;
    if (uses_solver_grid(k) || k == ExperimentKind::tune) {
        if (!(d.gamma > 0.0)) fail("dynamics.gamma", "must be > 0");
        if (!(d.diffusion > 0.0)) fail("dynamics.diffusion", "must be > 0");
    }
    if (k == ExperimentKind::langevin || k == ExperimentKind::fp ||
        k == ExperimentKind::schrodinger || k == ExperimentKind::madelung) {
        if (d.n_steps < 1) fail("dynamics.n_steps", "must be >= 1");
        if (d.snapshot_every < 0) fail("dynamics.snapshot_every", "must be >= 0");
    }
    if (k == ExperimentKind::langevin) {
        if (!(d.dt > 0.0)) fail("dynamics.dt", "must be > 0");
        if (d.n_replicas < 1) fail("dynamics.n_replicas", "must be >= 1");
        if (d.bandwidth < 0.0) fail("dynamics.bandwidth", "must be >= 0");
    }
    if (k == ExperimentKind::schrodinger && !(d.dt > 0.0))
        fail("dynamics.dt", "must be > 0");
    if (k == ExperimentKind::compare_quantum && !(d.duration > 0.0))
        fail("dynamics.duration", "must be > 0");
    if (uses_quantum(k)) {
        if (!(cfg.quantum.alpha > 0.0)) fail("quantum.alpha", "must be > 0");
        if (4.0 * d.diffusion * cfg.quantum.alpha / d.gamma < 1.0)
            fail("quantum.alpha",
                 "4 * diffusion * alpha / gamma must be >= 1 for a real "
                 "hbar");
        if (cfg.initial.shape != "gaussian")
            fail("initial.shape", "wave starts must be gaussian");
        bool moving = false;
        for (double v : cfg.initial.velocity) moving |= v != 0.0;
        if (moving && k == ExperimentKind::compare_quantum)
            fail("initial.velocity",
                 "compare-quantum starts from a resting packet");
        if (moving && cfg.grid.boundary == Boundary::periodic)
            fail("initial.velocity",
                 "nonzero flow needs a non-periodic grid (the phase would "
                 "jump across the seam)");
    }
    if (k == ExperimentKind::build_metric && !cfg.ensemble.file.empty() &&
        !cfg.sweep.epsilons.empty())
        fail("sweep.epsilons",
             "sweeps rescale a generated ensemble; remove ensemble.file");
}

bool needs_seed(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::langevin:
        case ExperimentKind::build_metric:
            return true;
        case ExperimentKind::einstein_check:
            return true;
        case ExperimentKind::geodesic:
            return cfg.metric.kind == "weak-field" ||
                   cfg.geodesic.perturbations > 0;
        case ExperimentKind::action:
            return cfg.metric.kind == "weak-field";
        default:
            return false;
    }
}

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.kind);
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    const ExperimentKind k = cfg.kind;
    if (uses_solver_grid(k)) {
        j["grid"] = gridspec_json(cfg.grid);
        j["potential"] = potential_json(cfg.potential);
        j["dynamics"] = dynamics_json(cfg.dynamics);
        j["initial"] = initial_json(cfg.initial);
    }
    if (uses_quantum(k)) j["quantum"] = quantum_json(cfg.quantum);
    if (k == ExperimentKind::compare_quantum) j["refine"] = cfg.refine;
    if (k == ExperimentKind::build_metric) {
        j["ensemble"] = ensemble_json(cfg.ensemble);
        j["field_grid"] = field_grid_json(cfg.field_grid);
        json s;
        s["epsilons"] = cfg.sweep.epsilons;
        j["sweep"] = s;
        json i;
        i["n_samples"] = cfg.interaction.n_samples;
        j["interaction"] = i;
        j["write_field"] = cfg.write_field;
    }
    if (uses_metric(k)) j["metric"] = metric_json(cfg.metric);
    if (k == ExperimentKind::geodesic) j["geodesic"] = geodesic_json(cfg.geodesic);
    if (k == ExperimentKind::einstein_check) j["probes"] = probes_json(cfg.probes);
    if (k == ExperimentKind::tune) {
        j["dynamics"] = dynamics_json(cfg.dynamics);
        j["tune"] = tune_json(cfg.tune);
    }
    j["tolerances"] = cfg.tolerances;
    return j;
}

}  // namespace

ExperimentKind experiment_kind(const std::string& name) {
    if (name == "langevin") return ExperimentKind::langevin;
    if (name == "fp") return ExperimentKind::fp;
    if (name == "schrodinger") return ExperimentKind::schrodinger;
    if (name == "madelung") return ExperimentKind::madelung;
    if (name == "compare-quantum") return ExperimentKind::compare_quantum;
    if (name == "build-metric") return ExperimentKind::build_metric;
    if (name == "geodesic") return ExperimentKind::geodesic;
    if (name == "action") return ExperimentKind::action;
    if (name == "einstein-check") return ExperimentKind::einstein_check;
    if (name == "tune") return ExperimentKind::tune;
    fail("experiment", "unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::langevin: return "langevin";
        case ExperimentKind::fp: return "fp";
        case ExperimentKind::schrodinger: return "schrodinger";
        case ExperimentKind::madelung: return "madelung";
        case ExperimentKind::compare_quantum: return "compare-quantum";
        case ExperimentKind::build_metric: return "build-metric";
        case ExperimentKind::geodesic: return "geodesic";
        case ExperimentKind::action: return "action";
        case ExperimentKind::einstein_check: return "einstein-check";
        case ExperimentKind::tune: return "tune";
    }
    throw Error("unreachable experiment kind");
}

std::map<std::string, double> default_tolerances(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::langevin:
            return {{"l1_stationary", 0.05}};
        case ExperimentKind::fp:
            return {{"l1_stationary", 1e-3}, {"mass_drift", 1e-12}};
        case ExperimentKind::schrodinger:
            return {{"norm_drift", 1e-9}};
        case ExperimentKind::madelung:
            return {{"mass_drift", 1e-8}};
        case ExperimentKind::compare_quantum:
            return {{"l1_pair", 1e-2}, {"order_min", 1.0}};
        case ExperimentKind::build_metric:
            return {{"count_rel", 1e-4},
                    {"slope_center", 2.0},
                    {"slope_band", 0.2}};
        case ExperimentKind::geodesic:
            return {{"norm_drift", 1e-6}, {"extremal_slack", 1e-10}};
        case ExperimentKind::action:
            return {{"flat_zero", 1e-8},
                    {"form_rel_gap", 0.05},
                    {"lambda_rel", 1e-12}};
        case ExperimentKind::einstein_check:
            return {{"variational_rel", 0.05}, {"flat_exact", 0.0}};
        case ExperimentKind::tune:
            return {{"saturation_rel", 1e-9}, {"quadratic_rel", 1e-12}};
    }
    throw Error("unreachable experiment kind");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("", "top level must be an object");

    ExperimentConfig cfg;
    cfg.kind = experiment_kind(as_string(require(j, "", "experiment"),
                                         "experiment"));
    const ExperimentKind k = cfg.kind;

    std::vector<const char*> allowed = {"experiment", "seed", "output",
                                        "tolerances"};
    if (uses_solver_grid(k)) {
        allowed.insert(allowed.end(),
                       {"grid", "potential", "dynamics", "initial"});
    }
    if (uses_quantum(k)) allowed.push_back("quantum");
    if (k == ExperimentKind::compare_quantum) allowed.push_back("refine");
    if (k == ExperimentKind::build_metric)
        allowed.insert(allowed.end(), {"ensemble", "field_grid", "sweep",
                                       "interaction", "write_field"});
    if (uses_metric(k)) allowed.push_back("metric");
    if (k == ExperimentKind::geodesic) allowed.push_back("geodesic");
    if (k == ExperimentKind::einstein_check) allowed.push_back("probes");
    if (k == ExperimentKind::tune)
        allowed.insert(allowed.end(), {"dynamics", "tune"});
    check_keys(j, "", allowed);

    cfg.output = get_string(j, "", "output", "");

    if (uses_solver_grid(k)) {
        cfg.grid = parse_gridspec(require(j, "", "grid"), "grid");
        if (const json* p = find(j, "potential"))
            cfg.potential = parse_potential(*p, "potential", cfg.grid.dim);
        else
            cfg.potential.center.assign(cfg.grid.dim, 0.0);
        if (const json* d = find(j, "dynamics"))
            cfg.dynamics = parse_dynamics(*d, "dynamics");
        const std::string default_shape =
            k == ExperimentKind::langevin || k == ExperimentKind::fp
                ? "uniform"
                : "gaussian";
        cfg.initial = parse_initial(find(j, "initial"), "initial",
                                    cfg.grid.dim, default_shape);
    }
    if (uses_quantum(k))
        if (const json* q = find(j, "quantum"))
            cfg.quantum = parse_quantum(*q, "quantum");
    if (k == ExperimentKind::compare_quantum)
        cfg.refine = get_bool(j, "", "refine", cfg.refine);
    if (k == ExperimentKind::build_metric) {
        if (const json* e = find(j, "ensemble"))
            cfg.ensemble = parse_ensemble(*e, "ensemble");
        if (const json* f = find(j, "field_grid"))
            cfg.field_grid = parse_field_grid(*f, "field_grid");
        if (const json* s = find(j, "sweep"))
            cfg.sweep = parse_sweep(*s, "sweep");
        if (const json* i = find(j, "interaction"))
            cfg.interaction = parse_interaction(*i, "interaction");
        cfg.write_field = get_bool(j, "", "write_field", cfg.write_field);
    }
    if (uses_metric(k))
        if (const json* m = find(j, "metric"))
            cfg.metric = parse_metric(*m, "metric");
    if (k == ExperimentKind::geodesic)
        if (const json* g = find(j, "geodesic"))
            cfg.geodesic = parse_geodesic(*g, "geodesic");
    if (k == ExperimentKind::einstein_check)
        if (const json* p = find(j, "probes"))
            cfg.probes = parse_probes(*p, "probes");
    if (k == ExperimentKind::tune) {
        if (const json* d = find(j, "dynamics"))
            cfg.dynamics = parse_dynamics(*d, "dynamics");
        if (const json* t = find(j, "tune")) cfg.tune = parse_tune(*t, "tune");
    }

    cfg.tolerances = default_tolerances(k);
    if (const json* t = find(j, "tolerances")) {
        if (!t->is_object()) fail("tolerances", "expected an object");
        for (const auto& item : t->items()) {
            auto it = cfg.tolerances.find(item.key());
            if (it == cfg.tolerances.end())
                fail("tolerances." + item.key(),
                     "unknown tolerance for experiment '" + to_string(k) +
                         "'");
            it->second = as_number(item.value(), "tolerances." + item.key());
        }
    }

    const json* seed = find(j, "seed");
    if (seed) {
        if (seed->is_number_unsigned()) {
            cfg.seed = seed->get<std::uint64_t>();
        } else {
            const long v = as_integer(*seed, "seed");
            if (v < 0) fail("seed", "must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(v);
        }
    }
    validate_values(cfg);
    if (!seed && needs_seed(cfg))
        fail("seed", "required: experiment '" + to_string(k) +
                         "' draws random numbers");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("", "cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    return config_json(cfg).dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string s = config_json(cfg).dump();
    return fnv1a64(s.data(), s.size());
}

PotentialSpec make_potential(const PotentialBlock& pb, int dim) {
    if (pb.kind != "zero" && pb.kind != "harmonic" &&
        pb.kind != "double-well" && pb.kind != "cosine")
        fail("potential.kind", "unknown potential kind '" + pb.kind + "'");
    std::vector<double> c = pb.center;
    c.resize(dim, 0.0);
    PotentialSpec spec;
    const std::string kind = pb.kind;
    const double s = pb.strength, depth = pb.depth, waves = pb.waves;
    spec.evaluate = [kind, s, depth, waves, c, dim](double q1, double q2) {
        double v = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double d = (a == 0 ? q1 : q2) - c[a];
            if (kind == "harmonic")
                v += 0.5 * s * d * d;
            else if (kind == "double-well")
                v += s * (d * d - depth) * (d * d - depth);
            else if (kind == "cosine")
                v += s * std::cos(waves * d);
        }
        return v;
    };
    return spec;
}

GradFn make_potential_gradient(const PotentialBlock& pb, int dim) {
    if (pb.kind != "zero" && pb.kind != "harmonic" &&
        pb.kind != "double-well" && pb.kind != "cosine")
        fail("potential.kind", "unknown potential kind '" + pb.kind + "'");
    std::vector<double> c = pb.center;
    c.resize(dim, 0.0);
    const std::string kind = pb.kind;
    const double s = pb.strength, depth = pb.depth, waves = pb.waves;
    return [kind, s, depth, waves, c, dim](const Eigen::VectorXd& q) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        for (int a = 0; a < dim && a < q.size(); ++a) {
            const double d = q[a] - c[a];
            if (kind == "harmonic")
                g[a] = s * d;
            else if (kind == "double-well")
                g[a] = 4.0 * s * d * (d * d - depth);
            else if (kind == "cosine")
                g[a] = -s * waves * std::sin(waves * d);
        }
        return g;
    };
}

SpacetimeMetric metric_from_block(const MetricBlock& mb, std::uint64_t seed) {
    if (mb.kind == "flat") return flat_spacetime(mb.grid);
    if (mb.kind == "frw") return frw_spacetime(mb.grid);
    if (mb.kind == "weak-field")
        return weak_field_spacetime(mb.grid, mb.epsilon, mb.modes, seed,
                                    mb.time_dependent, mb.max_wavenumber);
    if (mb.kind == "conformal") return conformal_spacetime(mb.grid, mb.c);
    if (mb.kind == "slab") return slab_spacetime(mb.grid, mb.c);
    fail("metric.kind", "unknown metric kind '" + mb.kind + "'");
}

bool RunRecord::passed() const {
    for (const auto& c : criteria)
        if (!c.passed) return false;
    return true;
}

// --------------------------------------------------------------------------
// Drivers.

namespace {

std::ofstream open_artifact(RunRecord& rec, const fs::path& dir,
                            const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot open " + (dir / name).string());
    out.precision(17);
    rec.artifacts.push_back(name);
    return out;
}

void add_criterion(RunRecord& rec, const std::string& name, double value,
                   double tolerance, const std::string& comparison) {
    CriterionResult c;
    c.name = name;
    c.value = value;
    c.tolerance = tolerance;
    c.comparison = comparison;
    if (comparison == "lt")
        c.passed = value < tolerance;
    else if (comparison == "le")
        c.passed = value <= tolerance;
    else if (comparison == "ge")
        c.passed = value >= tolerance;
    else
        throw Error("unknown comparison '" + comparison + "'");
    rec.criteria.push_back(c);
}

double tolerance_of(const ExperimentConfig& cfg, const char* name) {
    const auto it = cfg.tolerances.find(name);
    if (it == cfg.tolerances.end())
        throw Error(std::string("missing tolerance ") + name);
    return it->second;
}

void density_header(std::ostream& out, const GridSpec& g) {
    out << (g.dim == 2 ? "t,q1,q2,p\n" : "t,q1,p\n");
}

void append_density(std::ostream& out, const DensityField& p) {
    const int nj = p.grid.dim == 2 ? p.grid.res[1] : 1;
    for (int jj = 0; jj < nj; ++jj)
        for (int i = 0; i < p.grid.res[0]; ++i) {
            out << p.time << ',' << p.grid.coord(0, i);
            if (p.grid.dim == 2) out << ',' << p.grid.coord(1, jj);
            out << ',' << p.values[p.grid.index(i, jj)] << '\n';
        }
}

DensityField gaussian_density(const GridSpec& grid, const InitialBlock& init) {
    DensityField p{grid, std::vector<double>(grid.size(), 0.0), 0.0};
    const int nj = grid.dim == 2 ? grid.res[1] : 1;
    for (int jj = 0; jj < nj; ++jj)
        for (int i = 0; i < grid.res[0]; ++i) {
            double e = 0.0;
            for (int a = 0; a < grid.dim; ++a) {
                const double q = grid.coord(a, a == 0 ? i : jj);
                const double d = q - init.center[a];
                e += d * d / (2.0 * init.width[a] * init.width[a]);
            }
            p.values[grid.index(i, jj)] = std::exp(-e);
        }
    normalize(p);
    return p;
}

DensityField uniform_density(const GridSpec& grid) {
    DensityField p{grid, std::vector<double>(grid.size(), 1.0), 0.0};
    normalize(p);
    return p;
}

void run_langevin_driver(const ExperimentConfig& cfg, RunRecord& rec,
                         const fs::path& dir) {
    const auto& dyn = cfg.dynamics;
    LearningParams lp{dyn.gamma, dyn.diffusion, dyn.dt, dyn.n_replicas,
                      cfg.seed};
    const auto F = make_potential(cfg.potential, cfg.grid.dim).sample(cfg.grid);
    const auto grad = make_potential_gradient(cfg.potential, cfg.grid.dim);

    auto ens = make_ensemble(dyn.n_replicas, cfg.grid.dim);
    for (int a = 0; a < cfg.grid.dim; ++a)
        ens.positions.col(a).setConstant(cfg.initial.center[a]);

    auto dcsv = open_artifact(rec, dir, "density.csv");
    density_header(dcsv, cfg.grid);
    const long every = dyn.snapshot_every > 0 ? dyn.snapshot_every : dyn.n_steps;
    long done = 0;
    while (done < dyn.n_steps) {
        const long chunk = std::min(every, dyn.n_steps - done);
        langevin_run(ens, grad, lp, chunk, rec.threads);
        done += chunk;
        auto ed = empirical_density(ens, cfg.grid, dyn.bandwidth);
        ed.field.time = ens.time;
        append_density(dcsv, ed.field);
        if (done == dyn.n_steps) {
            rec.measurements["mass_deficit"] = ed.mass_deficit;
            const auto stat = fp_stationary(cfg.grid, F, lp);
            add_criterion(rec, "l1_stationary",
                          compare_densities(ed.field, stat),
                          tolerance_of(cfg, "l1_stationary"), "lt");
            auto scsv = open_artifact(rec, dir, "stationary.csv");
            density_header(scsv, cfg.grid);
            append_density(scsv, stat);
        }
    }
    rec.series["density"] = "density.csv";
    rec.series["stationary"] = "stationary.csv";
}

void run_fp_driver(const ExperimentConfig& cfg, RunRecord& rec,
                   const fs::path& dir) {
    const auto& dyn = cfg.dynamics;
    LearningParams lp{dyn.gamma, dyn.diffusion, dyn.dt, 1, cfg.seed};
    const auto F = make_potential(cfg.potential, cfg.grid.dim).sample(cfg.grid);
    if (lp.dt <= 0.0) lp.dt = fp_stable_dt(cfg.grid, F, lp);

    DensityField p = cfg.initial.shape == "gaussian"
                         ? gaussian_density(cfg.grid, cfg.initial)
                         : uniform_density(cfg.grid);
    rec.measurements["dt"] = lp.dt;
    rec.measurements["entropy_initial"] = shannon_entropy(p);

    auto dcsv = open_artifact(rec, dir, "density.csv");
    density_header(dcsv, cfg.grid);
    append_density(dcsv, p);
    const long every = dyn.snapshot_every > 0 ? dyn.snapshot_every : dyn.n_steps;
    for (long done = 0; done < dyn.n_steps;) {
        const long chunk = std::min(every, dyn.n_steps - done);
        for (long s = 0; s < chunk; ++s) p = fp_step(p, F, lp);
        done += chunk;
        append_density(dcsv, p);
    }
    rec.measurements["entropy_final"] = shannon_entropy(p);

    const auto stat = fp_stationary(cfg.grid, F, lp);
    add_criterion(rec, "l1_stationary", compare_densities(p, stat),
                  tolerance_of(cfg, "l1_stationary"), "lt");
    add_criterion(rec, "mass_drift", std::abs(total_mass(p) - 1.0),
                  tolerance_of(cfg, "mass_drift"), "lt");
    auto scsv = open_artifact(rec, dir, "stationary.csv");
    density_header(scsv, cfg.grid);
    append_density(scsv, stat);
    rec.series["density"] = "density.csv";
    rec.series["stationary"] = "stationary.csv";
}

std::vector<double> linear_phase(const GridSpec& grid, double mass,
                                 const std::vector<double>& velocity) {
    // u = (1/m) dFtilde; the packet flow is -u, so a flow v needs
    // Ftilde = -m v . q.
    std::vector<double> ft(grid.size(), 0.0);
    const int nj = grid.dim == 2 ? grid.res[1] : 1;
    for (int jj = 0; jj < nj; ++jj)
        for (int i = 0; i < grid.res[0]; ++i) {
            double v = 0.0;
            for (int a = 0; a < grid.dim; ++a)
                v -= mass * velocity[a] * grid.coord(a, a == 0 ? i : jj);
            ft[grid.index(i, jj)] = v;
        }
    return ft;
}

void run_schrodinger_driver(const ExperimentConfig& cfg, RunRecord& rec,
                            const fs::path& dir) {
    const auto& dyn = cfg.dynamics;
    const QuantumParams qp = QuantumParams::from(
        cfg.quantum.alpha, dyn.diffusion, dyn.gamma, cfg.quantum.mu_sign);
    const auto V = make_potential(cfg.potential, cfg.grid.dim).sample(cfg.grid);

    const DensityField p0 = gaussian_density(cfg.grid, cfg.initial);
    const auto ft = linear_phase(cfg.grid, qp.mass, cfg.initial.velocity);
    WaveField w = to_wavefunction(p0, ft, qp.hbar, qp.mass);
    const double norm0 = wave_norm(w);
    rec.measurements["hbar"] = qp.hbar;
    rec.measurements["mass"] = qp.mass;

    auto dcsv = open_artifact(rec, dir, "density.csv");
    density_header(dcsv, cfg.grid);
    append_density(dcsv, wave_density(w));
    const long every = dyn.snapshot_every > 0 ? dyn.snapshot_every : dyn.n_steps;
    for (long done = 0; done < dyn.n_steps;) {
        const long chunk = std::min(every, dyn.n_steps - done);
        w = schrodinger_run(w, V, dyn.dt, chunk);
        done += chunk;
        append_density(dcsv, wave_density(w));
    }
    add_criterion(rec, "norm_drift", std::abs(wave_norm(w) - norm0),
                  tolerance_of(cfg, "norm_drift"), "lt");
    write_wavefield_csv(w, (dir / "wave.csv").string());
    rec.artifacts.push_back("wave.csv");
    rec.series["density"] = "density.csv";
    rec.series["wavefunction"] = "wave.csv";
}

void run_madelung_driver(const ExperimentConfig& cfg, RunRecord& rec,
                         const fs::path& dir) {
    const auto& dyn = cfg.dynamics;
    const QuantumParams qp = QuantumParams::from(
        cfg.quantum.alpha, dyn.diffusion, dyn.gamma, cfg.quantum.mu_sign);
    const auto V = make_potential(cfg.potential, cfg.grid.dim).sample(cfg.grid);

    MadelungState st;
    st.p = gaussian_density(cfg.grid, cfg.initial);
    st.u.grid = cfg.grid;
    for (int a = 0; a < 2; ++a)
        st.u.comps[a].assign(cfg.grid.size(), 0.0);
    for (int a = 0; a < cfg.grid.dim; ++a)
        if (cfg.initial.velocity[a] != 0.0)
            st.u.comps[a].assign(cfg.grid.size(), -cfg.initial.velocity[a]);

    double dt = dyn.dt;
    if (dt <= 0.0) dt = 0.5 * madelung_stable_dt(st, qp);
    rec.measurements["dt"] = dt;
    rec.measurements["hbar"] = qp.hbar;

    auto dcsv = open_artifact(rec, dir, "density.csv");
    density_header(dcsv, cfg.grid);
    append_density(dcsv, st.p);
    const long every = dyn.snapshot_every > 0 ? dyn.snapshot_every : dyn.n_steps;
    for (long done = 0; done < dyn.n_steps;) {
        const long chunk = std::min(every, dyn.n_steps - done);
        st = madelung_run(st, V, qp, dt, chunk);
        done += chunk;
        append_density(dcsv, st.p);
    }
    add_criterion(rec, "mass_drift", std::abs(total_mass(st.p) - 1.0),
                  tolerance_of(cfg, "mass_drift"), "lt");

    auto ucsv = open_artifact(rec, dir, "velocity.csv");
    ucsv << (cfg.grid.dim == 2 ? "t,q1,q2,u1,u2\n" : "t,q1,u1\n");
    const int nj = cfg.grid.dim == 2 ? cfg.grid.res[1] : 1;
    for (int jj = 0; jj < nj; ++jj)
        for (int i = 0; i < cfg.grid.res[0]; ++i) {
            ucsv << st.u.time << ',' << cfg.grid.coord(0, i);
            if (cfg.grid.dim == 2) ucsv << ',' << cfg.grid.coord(1, jj);
            ucsv << ',' << st.u.comps[0][cfg.grid.index(i, jj)];
            if (cfg.grid.dim == 2)
                ucsv << ',' << st.u.comps[1][cfg.grid.index(i, jj)];
            ucsv << '\n';
        }
    rec.series["density"] = "density.csv";
    rec.series["velocity"] = "velocity.csv";
}

// Evolves the hydrodynamic and wave forms from the same gaussian start and
// returns their final L1 density distance; optionally keeps the finals.
double quantum_pair_l1(const ExperimentConfig& cfg, const GridSpec& grid,
                       const QuantumParams& qp, DensityField* m_out,
                       DensityField* s_out) {
    const auto V = make_potential(cfg.potential, grid.dim).sample(grid);
    MadelungState st;
    st.p = gaussian_density(grid, cfg.initial);
    st.u.grid = grid;
    for (int a = 0; a < 2; ++a) st.u.comps[a].assign(grid.size(), 0.0);

    const double dt0 = 0.5 * madelung_stable_dt(st, qp);
    const long n = static_cast<long>(std::ceil(cfg.dynamics.duration / dt0));
    const double dt = cfg.dynamics.duration / static_cast<double>(n);

    WaveField w =
        to_wavefunction(st.p, std::vector<double>(grid.size(), 0.0), qp.hbar,
                        qp.mass);
    // The hydrodynamic bound tightens as the flow accelerates, so that side
    // re-derives its step as it goes; the wave side is unconditionally stable
    // and keeps the fixed step.  Both land at t = duration.
    st = madelung_run_adaptive(st, V, qp, cfg.dynamics.duration);
    w = schrodinger_run(w, V, dt, n);
    DensityField sd = wave_density(w);
    const double l1 = compare_densities(st.p, sd);
    if (m_out) *m_out = st.p;
    if (s_out) *s_out = sd;
    return l1;
}

void run_compare_quantum_driver(const ExperimentConfig& cfg, RunRecord& rec,
                                const fs::path& dir) {
    const QuantumParams qp =
        QuantumParams::from(cfg.quantum.alpha, cfg.dynamics.diffusion,
                            cfg.dynamics.gamma, cfg.quantum.mu_sign);
    rec.measurements["hbar"] = qp.hbar;
    rec.measurements["mass"] = qp.mass;

    DensityField mfinal, sfinal;
    const double l1 = quantum_pair_l1(cfg, cfg.grid, qp, &mfinal, &sfinal);
    add_criterion(rec, "l1_pair", l1, tolerance_of(cfg, "l1_pair"), "lt");

    if (cfg.refine) {
        // Refine upward: the base grid already has to resolve the tail, so
        // halving it instead would measure a preasymptotic pair.
        GridSpec fine = cfg.grid;
        for (int a = 0; a < cfg.grid.dim; ++a) fine.res[a] *= 2;
        const double l1_fine = quantum_pair_l1(cfg, fine, qp, nullptr, nullptr);
        rec.measurements["l1_refined"] = l1_fine;
        const double order = std::log2(l1 / l1_fine);
        add_criterion(rec, "halving_order", order,
                      tolerance_of(cfg, "order_min"), "ge");
    }

    auto mcsv = open_artifact(rec, dir, "madelung_density.csv");
    density_header(mcsv, cfg.grid);
    append_density(mcsv, mfinal);
    auto scsv = open_artifact(rec, dir, "schrodinger_density.csv");
    density_header(scsv, cfg.grid);
    append_density(scsv, sfinal);
    rec.series["madelung-density"] = "madelung_density.csv";
    rec.series["schrodinger-density"] = "schrodinger_density.csv";
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    return num / den;
}

void run_build_metric_driver(const ExperimentConfig& cfg, RunRecord& rec,
                             const fs::path& dir) {
    const SpatialGrid sg = to_spatial(cfg.field_grid);
    NeuronEnsemble ens =
        cfg.ensemble.file.empty()
            ? perturbed_ensemble(cfg.ensemble.n, cfg.ensemble.epsilon,
                                 cfg.seed, cfg.ensemble.box_half)
            : load_ensemble_json(cfg.ensemble.file);
    check_margin(ens, sg);

    const MetricField mf = metric_field(ens, sg);
    const double count = neuron_count(ens, sg);
    const double expect = static_cast<double>(ens.count());
    const double count_rel = std::abs(count - expect) / expect;
    rec.measurements["neuron_count"] = count;
    rec.measurements["count_rel_error"] = count_rel;
    rec.measurements["inverse_consistency"] = inverse_consistency(mf);
    rec.measurements["determinant_consistency"] =
        determinant_consistency(mf, ens);
    rec.measurements["n_empty"] = static_cast<double>(mf.n_empty());
    add_criterion(rec, "count_rel_error", count_rel,
                  tolerance_of(cfg, "count_rel"), "lt");

    save_ensemble_json(ens, (dir / "ensemble.json").string());
    rec.artifacts.push_back("ensemble.json");

    if (!cfg.sweep.epsilons.empty()) {
        auto sweep = open_artifact(rec, dir, "sweep.csv");
        sweep << "epsilon,inverse_residual,determinant_residual\n";
        std::vector<double> le, li, ld;
        for (double eps : cfg.sweep.epsilons) {
            const NeuronEnsemble e = perturbed_ensemble(
                cfg.ensemble.n, eps, cfg.seed, cfg.ensemble.box_half);
            const MetricField m = metric_field(e, sg);
            const double inv = inverse_consistency(m);
            const double det = determinant_consistency(m, e);
            sweep << eps << ',' << inv << ',' << det << '\n';
            le.push_back(std::log(eps));
            li.push_back(std::log(inv));
            ld.push_back(std::log(det));
        }
        rec.series["epsilon-sweep"] = "sweep.csv";
        if (cfg.sweep.epsilons.size() >= 3) {
            const double si = fit_slope(le, li);
            const double sd = fit_slope(le, ld);
            rec.measurements["inverse_slope"] = si;
            rec.measurements["determinant_slope"] = sd;
            const double center = tolerance_of(cfg, "slope_center");
            const double band = tolerance_of(cfg, "slope_band");
            add_criterion(rec, "inverse_slope_dev", std::abs(si - center),
                          band, "le");
            add_criterion(rec, "determinant_slope_dev", std::abs(sd - center),
                          band, "le");
        }
    }

    if (cfg.interaction.n_samples > 0) {
        const InteractionReport ir =
            interaction_entropy(ens, mf, cfg.interaction.n_samples, cfg.seed);
        rec.measurements["interaction_total"] = ir.total;
        rec.measurements["balance_residual"] = ir.balance_residual;
        rec.measurements["moment_error"] = ir.moment_error;
    }

    if (cfg.write_field) {
        auto fcsv = open_artifact(rec, dir, "field.csv");
        fcsv << "x,y,z,g00,g01,g02,g03,g11,g12,g13,g22,g23,g33,density,"
                "empty\n";
        for (int i = 0; i < sg.res[0]; ++i)
            for (int jj = 0; jj < sg.res[1]; ++jj)
                for (int kk = 0; kk < sg.res[2]; ++kk) {
                    const std::size_t node = sg.index(i, jj, kk);
                    const Eigen::Matrix4d& g = mf.g[node];
                    fcsv << sg.coord(0, i) << ',' << sg.coord(1, jj) << ','
                         << sg.coord(2, kk);
                    for (int a = 0; a < 4; ++a)
                        for (int b = a; b < 4; ++b) fcsv << ',' << g(a, b);
                    fcsv << ',' << mf.sqrt_minus_g[node] << ','
                         << static_cast<int>(mf.empty[node]) << '\n';
                }
        rec.series["metric"] = "field.csv";
    }
}

void run_geodesic_driver(const ExperimentConfig& cfg, RunRecord& rec,
                         const fs::path& dir) {
    const SpacetimeMetric sm = metric_from_block(cfg.metric, cfg.seed);
    const ChristoffelField cf = christoffel(sm);
    const auto& gb = cfg.geodesic;
    const Eigen::Vector4d x0(gb.x0[0], gb.x0[1], gb.x0[2], gb.x0[3]);
    const Eigen::Vector3d v0(gb.v0[0], gb.v0[1], gb.v0[2]);

    const GeodesicPath path =
        gb.proper ? geodesic_integrate_proper(cf, sm, x0, v0, gb.duration,
                                              gb.dt)
                  : geodesic_integrate(cf, x0, v0, gb.duration, gb.dt);

    // Accumulated proper time along the polygonal path; spacelike segments
    // contribute nothing and are counted separately.
    std::vector<double> tau(path.positions.size(), 0.0);
    long spacelike = 0;
    for (std::size_t sgm = 0; sgm + 1 < path.positions.size(); ++sgm) {
        const Eigen::Vector4d mid =
            0.5 * (path.positions[sgm] + path.positions[sgm + 1]);
        const Eigen::Vector4d dx =
            path.positions[sgm + 1] - path.positions[sgm];
        Eigen::Matrix4d g;
        double ds2 = 0.0;
        const double x[4] = {mid[0], mid[1], mid[2], mid[3]};
        if (sample_metric(sm, x, g)) ds2 = -dx.dot(g * dx);
        if (ds2 < -1e-12 * std::max(1.0, dx.squaredNorm())) ++spacelike;
        tau[sgm + 1] = tau[sgm] + std::sqrt(std::max(0.0, ds2));
    }

    auto pcsv = open_artifact(rec, dir, "path.csv");
    pcsv << "t,x1,x2,x3,xd0,xd1,xd2,xd3,tau\n";
    for (std::size_t i = 0; i < path.positions.size(); ++i) {
        const auto& x = path.positions[i];
        const auto& v = path.velocities[i];
        pcsv << x[0] << ',' << x[1] << ',' << x[2] << ',' << x[3];
        for (int a = 0; a < 4; ++a) pcsv << ',' << v[a];
        pcsv << ',' << tau[i] << '\n';
    }
    rec.series["path"] = "path.csv";

    rec.measurements["n_steps"] = static_cast<double>(path.n_steps);
    rec.measurements["exited"] = path.exited ? 1.0 : 0.0;
    rec.measurements["tau_total"] = tau.back();
    rec.measurements["spacelike_segments"] = static_cast<double>(spacelike);
    if (gb.proper)
        add_criterion(rec, "norm_drift", path.max_norm_drift,
                      tolerance_of(cfg, "norm_drift"), "lt");

    if (gb.perturbations > 0) {
        const double tau_geo = proper_time(sm, path.positions);
        double best = -std::numeric_limits<double>::infinity();
        double min_margin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < gb.perturbations; ++k) {
            const auto pert = perturb_path(
                path.positions, cfg.seed + 7919ull * (k + 1), gb.amplitude);
            const double tp = proper_time(sm, pert);
            best = std::max(best, tp);
            min_margin = std::min(min_margin, tau_geo - tp);
        }
        rec.measurements["tau_geodesic"] = tau_geo;
        rec.measurements["tau_best_perturbed"] = best;
        const double slack = tolerance_of(cfg, "extremal_slack") *
                             std::max(1.0, std::abs(tau_geo));
        add_criterion(rec, "extremal_margin", min_margin, -slack, "ge");
    }
}

void run_action_driver(const ExperimentConfig& cfg, RunRecord& rec,
                       const fs::path& dir) {
    const SpacetimeMetric sm = metric_from_block(cfg.metric, cfg.seed);
    const ActionReport base = eh_action(sm);
    const double n_bar =
        cfg.metric.n_bar_is_volume ? base.volume : cfg.metric.n_bar;
    const ActionReport ar = lambda_functional(sm, cfg.metric.lambda, n_bar);

    rec.measurements["gamma_gamma_value"] = ar.gamma_gamma_value;
    rec.measurements["ricci_value"] = ar.ricci_value;
    rec.measurements["volume"] = ar.volume;
    rec.measurements["total"] = ar.total;

    json out;
    out["gamma_gamma_value"] = ar.gamma_gamma_value;
    out["ricci_value"] = ar.ricci_value;
    out["lambda"] = ar.lambda;
    out["n_bar"] = ar.n_bar;
    out["volume"] = ar.volume;
    out["total"] = ar.total;
    auto f = open_artifact(rec, dir, "action.json");
    f << out.dump(2) << "\n";

    if (cfg.metric.kind == "flat") {
        const double scale = std::max(1.0, std::abs(ar.volume));
        const double tol = tolerance_of(cfg, "flat_zero") * scale;
        add_criterion(rec, "gamma_gamma_zero",
                      std::abs(ar.gamma_gamma_value), tol, "le");
        add_criterion(rec, "ricci_zero", std::abs(ar.ricci_value), tol, "le");
    } else {
        bool all_periodic = true;
        for (int a = 0; a < 4; ++a)
            if (sm.grid.res[a] > 1 && !sm.grid.periodic[a])
                all_periodic = false;
        if (all_periodic) {
            const double gap =
                std::abs(ar.gamma_gamma_value - ar.ricci_value) /
                std::max(std::abs(ar.ricci_value), 1e-300);
            add_criterion(rec, "form_rel_gap", gap,
                          tolerance_of(cfg, "form_rel_gap"), "lt");
        }
    }
    if (cfg.metric.lambda != 0.0 && cfg.metric.n_bar_is_volume) {
        const double dev = std::abs(ar.total - ar.ricci_value) /
                           std::max(1.0, std::abs(ar.ricci_value));
        add_criterion(rec, "lambda_cancellation", dev,
                      tolerance_of(cfg, "lambda_rel"), "le");
    }
}

void run_einstein_check_driver(const ExperimentConfig& cfg, RunRecord& rec,
                               const fs::path& dir) {
    const SpacetimeMetric sm = metric_from_block(cfg.metric, cfg.seed);
    const double lambda = cfg.metric.lambda;
    json out;
    if (cfg.metric.kind == "flat") {
        const EinsteinField ef = einstein_residual(sm, lambda);
        const Eigen::Matrix4d target = lambda * minkowski_eta();
        double dev = 0.0;
        for (std::size_t n = 0; n < ef.value.size(); ++n) {
            if (ef.flagged[n]) continue;
            dev = std::max(
                dev, (ef.value[n] - target).cwiseAbs().maxCoeff());
        }
        rec.measurements["flat_lambda_exact"] = dev;
        add_criterion(rec, "flat_lambda_exact", dev,
                      tolerance_of(cfg, "flat_exact"), "le");
        out["flat_lambda_exact"] = dev;
        out["residual_max"] = ef.max_abs();
    } else {
        const VariationalCheck vc = einstein_variational_check(
            sm, lambda, cfg.probes.count, cfg.seed, cfg.probes.delta);
        rec.measurements["variational_rel"] = vc.max_relative_error;
        rec.measurements["scale"] = vc.scale;
        rec.measurements["n_probes"] = static_cast<double>(vc.n_probes);
        add_criterion(rec, "variational_rel", vc.max_relative_error,
                      tolerance_of(cfg, "variational_rel"), "lt");
        out["variational_rel"] = vc.max_relative_error;
        out["scale"] = vc.scale;
        out["n_probes"] = vc.n_probes;
    }
    out["lambda"] = lambda;
    auto f = open_artifact(rec, dir, "residual.json");
    f << out.dump(2) << "\n";
}

void run_tune_driver(const ExperimentConfig& cfg, RunRecord& rec,
                     const fs::path& dir) {
    LearningParams lp;
    lp.gamma = cfg.dynamics.gamma;
    lp.diffusion = cfg.dynamics.diffusion;
    const TuneKnob knob = cfg.tune.knob == "gamma" ? TuneKnob::gamma
                                                   : TuneKnob::diffusion;
    const LearningParams tuned =
        tune_parameters(lp, cfg.tune.target_hbar, knob);

    const double pi = std::acos(-1.0);
    const double mu = 2.0 * pi * cfg.tune.target_hbar;
    const double sat = std::abs(tuned.gamma * mu / tuned.diffusion);
    add_criterion(rec, "saturation_rel", std::abs(sat - 4.0 * pi) / (4.0 * pi),
                  tolerance_of(cfg, "saturation_rel"), "lt");

    const auto roots = alpha_roots(tuned.diffusion, tuned.gamma, mu);
    double quad = std::numeric_limits<double>::infinity();
    json out;
    out["gamma"] = tuned.gamma;
    out["diffusion"] = tuned.diffusion;
    out["mu"] = mu;
    out["target_hbar"] = cfg.tune.target_hbar;
    if (roots) {
        quad = 0.0;
        const double k2 = (mu / (2.0 * pi)) * (mu / (2.0 * pi));
        const double b = 4.0 * tuned.diffusion / tuned.gamma;
        for (double a : {roots->first, roots->second}) {
            const double res = k2 * a * a - b * a + 1.0;
            const double scale = k2 * a * a + b * a + 1.0;
            quad = std::max(quad, std::abs(res) / scale);
        }
        out["alpha_minus"] = roots->first;
        out["alpha_plus"] = roots->second;
        rec.measurements["alpha_minus"] = roots->first;
        rec.measurements["alpha_plus"] = roots->second;
        rec.measurements["hbar_minus"] =
            hbar_of(roots->first, tuned.diffusion, tuned.gamma);
    }
    add_criterion(rec, "quadratic_rel", quad,
                  tolerance_of(cfg, "quadratic_rel"), "lt");
    rec.measurements["gamma"] = tuned.gamma;
    rec.measurements["diffusion"] = tuned.diffusion;
    auto f = open_artifact(rec, dir, "tuned.json");
    f << out.dump(2) << "\n";
}

json record_json(const RunRecord& rec) {
    json j;
    j["experiment"] = rec.experiment;
    j["code_version"] = rec.code_version;
    j["config_hash"] = rec.config_hash;
    j["seed"] = rec.seed;
    j["threads"] = rec.threads;
    j["reference"] = rec.reference;
    j["wall_time_seconds"] = rec.wall_time_seconds;
    json cs = json::array();
    for (const auto& c : rec.criteria) {
        json e;
        e["name"] = c.name;
        e["value"] = c.value;
        e["tolerance"] = c.tolerance;
        e["comparison"] = c.comparison;
        e["passed"] = c.passed;
        cs.push_back(e);
    }
    j["criteria"] = cs;
    j["measurements"] = rec.measurements;
    j["artifacts"] = rec.artifacts;
    j["series"] = rec.series;
    j["config"] = config_json(rec.config);
    return j;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.experiment = to_string(cfg.kind);
    rec.code_version = kCodeVersion;
    {
        std::ostringstream h;
        h << std::hex << std::setw(16) << std::setfill('0')
          << config_hash(cfg);
        rec.config_hash = h.str();
    }
    rec.seed = cfg.seed;
    rec.reference = opt.reference;
    rec.threads = opt.reference ? 1 : std::max(1, opt.threads);
    rec.config = cfg;

    const fs::path dir = !opt.out_dir.empty() ? fs::path(opt.out_dir)
                         : !cfg.output.empty()
                             ? fs::path(cfg.output)
                             : fs::path("runs") / rec.experiment;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string());

    switch (cfg.kind) {
        case ExperimentKind::langevin:
            run_langevin_driver(cfg, rec, dir);
            break;
        case ExperimentKind::fp:
            run_fp_driver(cfg, rec, dir);
            break;
        case ExperimentKind::schrodinger:
            run_schrodinger_driver(cfg, rec, dir);
            break;
        case ExperimentKind::madelung:
            run_madelung_driver(cfg, rec, dir);
            break;
        case ExperimentKind::compare_quantum:
            run_compare_quantum_driver(cfg, rec, dir);
            break;
        case ExperimentKind::build_metric:
            run_build_metric_driver(cfg, rec, dir);
            break;
        case ExperimentKind::geodesic:
            run_geodesic_driver(cfg, rec, dir);
            break;
        case ExperimentKind::action:
            run_action_driver(cfg, rec, dir);
            break;
        case ExperimentKind::einstein_check:
            run_einstein_check_driver(cfg, rec, dir);
            break;
        case ExperimentKind::tune:
            run_tune_driver(cfg, rec, dir);
            break;
    }

    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::ofstream out(dir / "runrecord.json");
    if (!out) throw Error("cannot write " + (dir / "runrecord.json").string());
    out << serialize_runrecord(rec);
    return rec;
}

std::string serialize_runrecord(const RunRecord& rec) {
    return record_json(rec).dump(2) + "\n";
}

RunRecord load_runrecord(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("", "cannot open run record " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail("", std::string("invalid run record JSON: ") + e.what());
    }
    RunRecord rec;
    rec.experiment = as_string(require(j, "", "experiment"), "experiment");
    rec.code_version = get_string(j, "", "code_version", "");
    rec.config_hash = get_string(j, "", "config_hash", "");
    rec.seed = static_cast<std::uint64_t>(get_integer(j, "", "seed", 0));
    rec.threads = static_cast<int>(get_integer(j, "", "threads", 1));
    rec.reference = get_bool(j, "", "reference", false);
    rec.wall_time_seconds = get_number(j, "", "wall_time_seconds", 0.0);
    if (const json* cs = find(j, "criteria")) {
        if (!cs->is_array()) fail("criteria", "expected an array");
        for (std::size_t i = 0; i < cs->size(); ++i) {
            const json& e = (*cs)[i];
            const std::string p = "criteria[" + std::to_string(i) + "]";
            CriterionResult c;
            c.name = as_string(require(e, p, "name"), p + ".name");
            c.value = get_number(e, p, "value", 0.0);
            c.tolerance = get_number(e, p, "tolerance", 0.0);
            c.comparison = get_string(e, p, "comparison", "lt");
            c.passed = get_bool(e, p, "passed", false);
            rec.criteria.push_back(c);
        }
    }
    if (const json* m = find(j, "measurements")) {
        if (!m->is_object()) fail("measurements", "expected an object");
        for (const auto& item : m->items())
            rec.measurements[item.key()] =
                as_number(item.value(), "measurements." + item.key());
    }
    if (const json* a = find(j, "artifacts")) {
        if (!a->is_array()) fail("artifacts", "expected an array");
        for (std::size_t i = 0; i < a->size(); ++i)
            rec.artifacts.push_back(as_string(
                (*a)[i], "artifacts[" + std::to_string(i) + "]"));
    }
    if (const json* s = find(j, "series")) {
        if (!s->is_object()) fail("series", "expected an object");
        for (const auto& item : s->items())
            rec.series[item.key()] =
                as_string(item.value(), "series." + item.key());
    }
    if (const json* c = find(j, "config"))
        rec.config = parse_config(c->dump());
    return rec;
}

void emit_series(const std::string& runrecord_path, const std::string& series,
                 std::ostream& out) {
    const RunRecord rec = load_runrecord(runrecord_path);
    const auto it = rec.series.find(series);
    if (it == rec.series.end()) {
        std::string avail;
        for (const auto& [name, artifact] : rec.series) {
            if (!avail.empty()) avail += ", ";
            avail += name;
        }
        fail("series", "unknown series '" + series + "'; available: " +
                           (avail.empty() ? "(none)" : avail));
    }
    const fs::path art =
        fs::path(runrecord_path).parent_path() / it->second;
    std::ifstream in(art, std::ios::binary);
    if (!in) throw Error("missing artifact " + art.string());
    out << in.rdbuf();
}

}  // namespace emlab
