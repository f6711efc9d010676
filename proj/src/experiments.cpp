#include "chronon/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "chronon/boundary_value.hpp"

namespace chronon {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// ---- config access with defaults, echoing everything into `resolved` ----

class Cfg {
public:
    Cfg(const json& raw, json& resolved) : raw_(raw), resolved_(resolved) {}

    double number(const std::string& key, std::optional<double> def = {}) const {
        const json* j = find(key);
        if (!j) {
            if (!def) throw ConfigError(key + ": missing required field");
            resolved_[key] = *def;
            return *def;
        }
        if (!j->is_number()) throw ConfigError(key + ": expected a number");
        resolved_[key] = *j;
        return j->get<double>();
    }

    long long integer(const std::string& key, std::optional<long long> def = {}) const {
        const json* j = find(key);
        if (!j) {
            if (!def) throw ConfigError(key + ": missing required field");
            resolved_[key] = *def;
            return *def;
        }
        if (!j->is_number_integer()) throw ConfigError(key + ": expected an integer");
        resolved_[key] = *j;
        return j->get<long long>();
    }

    bool boolean(const std::string& key, bool def) const {
        const json* j = find(key);
        if (!j) {
            resolved_[key] = def;
            return def;
        }
        if (!j->is_boolean()) throw ConfigError(key + ": expected a boolean");
        resolved_[key] = *j;
        return j->get<bool>();
    }

    std::vector<double> number_list(const std::string& key, std::vector<double> def) const {
        const json* j = find(key);
        if (!j) {
            resolved_[key] = def;
            return def;
        }
        if (!j->is_array() || j->empty()) throw ConfigError(key + ": expected a non-empty array");
        for (const auto& v : *j)
            if (!v.is_number()) throw ConfigError(key + ": expected numbers");
        resolved_[key] = *j;
        return j->get<std::vector<double>>();
    }

    std::vector<long long> int_list(const std::string& key, std::vector<long long> def) const {
        const json* j = find(key);
        if (!j) {
            resolved_[key] = json(def);
            return def;
        }
        if (!j->is_array() || j->empty()) throw ConfigError(key + ": expected a non-empty array");
        resolved_[key] = *j;
        return j->get<std::vector<long long>>();
    }

    const json* find(const std::string& dotted) const {
        const json* cur = &raw_;
        size_t pos = 0;
        while (true) {
            const size_t dot = dotted.find('.', pos);
            const std::string part = dotted.substr(pos, dot - pos);
            if (!cur->is_object() || !cur->contains(part)) return nullptr;
            cur = &cur->at(part);
            if (dot == std::string::npos) return cur;
            pos = dot + 1;
        }
    }

    json& resolved() { return resolved_; }

private:
    const json& raw_;
    json& resolved_;
};

void set_resolved(json& resolved, const std::string& dotted, json value) {
    json* cur = &resolved;
    size_t pos = 0;
    while (true) {
        const size_t dot = dotted.find('.', pos);
        const std::string part = dotted.substr(pos, dot - pos);
        if (dot == std::string::npos) {
            (*cur)[part] = std::move(value);
            return;
        }
        cur = &(*cur)[part];
        pos = dot + 1;
    }
}

HamiltonianSchedule schedule_from_cfg(const json& raw, json& resolved) {
    if (!raw.contains("schedule")) throw ConfigError("schedule: missing required field");
    resolved["schedule"] = raw.at("schedule");
    return schedule_from_json(raw.at("schedule"), "schedule");
}

IntensityProfile intensity_from_cfg(const json& raw, json& resolved) {
    if (!raw.contains("intensity")) {
        resolved["intensity"] = json{{"kind", "constant"}, {"value", 1.0}};
        return IntensityProfile::constant(1.0);
    }
    resolved["intensity"] = raw.at("intensity");
    return intensity_from_json(raw.at("intensity"), "intensity");
}

struct CommonParams {
    double t;
    std::uint64_t seed;
    int threads;
    bool timing;
    bool gates;
};

CommonParams common_params(const Cfg& cfg) {
    CommonParams p;
    p.t = cfg.number("horizon", 1.0);
    if (!(p.t > 0.0)) throw ConfigError("horizon: must be positive");
    p.seed = static_cast<std::uint64_t>(cfg.integer("seed", 20260808));
    p.threads = static_cast<int>(cfg.integer("threads", 1));
    if (p.threads < 1) throw ConfigError("threads: must be >= 1");
    p.timing = cfg.boolean("timing", false);
    p.gates = cfg.boolean("gates", true);
    return p;
}

json make_header(const std::string& experiment, const json& resolved) {
    json h = resolved;
    h["experiment"] = experiment;
    h["norm"] = "max-entry";
    h["tool"] = "chronon";
    return h;
}

void push(ResultTable& table, const std::string& experiment, std::string params,
          std::string metric, double value, std::optional<double> error = {}) {
    table.rows.push_back({experiment, std::move(params), std::move(metric), value, error});
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::string ResultTable::to_csv() const {
    std::ostringstream os;
    os << "# " << header.dump() << "\n";
    os << "experiment,params,metric,value,error\n";
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.params << ',' << r.metric << ',' << fmt(r.value) << ',';
        if (r.error) os << fmt(*r.error);
        os << '\n';
    }
    return os.str();
}

ExperimentResult run_compare(const json& config) {
    json resolved;
    Cfg cfg(config, resolved);
    const CommonParams p = common_params(cfg);
    const HamiltonianSchedule schedule = schedule_from_cfg(config, resolved);
    const IntensityProfile intensity = intensity_from_cfg(config, resolved);

    const int ref_steps = static_cast<int>(cfg.integer("reference_steps", 10000));
    const int order = static_cast<int>(cfg.integer("dyson.order", 12));
    const int nodes = static_cast<int>(cfg.integer("dyson.nodes", 10));
    const int quad_sectors = static_cast<int>(cfg.integer("dyson.quad_sectors", 4));
    const int tail_steps = static_cast<int>(cfg.integer("dyson.tail_steps", 2048));
    const int picard_steps = static_cast<int>(cfg.integer("picard.steps", 2048));
    const long long samples = cfg.integer("mc.samples", 100000);
    const int batches = static_cast<int>(cfg.integer("mc.batches", 20));

    ExperimentResult out;
    out.table.header = make_header("compare", resolved);

    const double t0 = now_ms();
    const PropagatorEstimate ref = reference_propagator(schedule, 0.0, p.t, ref_steps);
    const double t1 = now_ms();
    const PropagatorEstimate dyson =
        vacuum_expectation_dyson(schedule, p.t, order, nodes, quad_sectors, tail_steps);
    const double t2 = now_ms();
    const PropagatorEstimate picard = picard_propagator(schedule, p.t, order, picard_steps);
    const double t3 = now_ms();
    const PropagatorEstimate mc =
        poisson_expectation_mc(schedule, intensity, p.t, samples, p.seed, p.threads, batches);
    const double t4 = now_ms();

    const std::string ex = "compare";
    push(out.table, ex, "method=reference", "unitarity_defect", unitarity_defect(ref.matrix));
    push(out.table, ex, "method=dyson", "defect", max_abs_diff(dyson.matrix, ref.matrix));
    push(out.table, ex, "method=picard", "defect", max_abs_diff(picard.matrix, ref.matrix));
    push(out.table, ex, "method=dyson_vs_picard", "defect",
         max_abs_diff(dyson.matrix, picard.matrix));
    push(out.table, ex, "method=poisson_mc", "defect", max_abs_diff(mc.matrix, ref.matrix),
         mc.mc_stderr);
    push(out.table, ex, "method=poisson_mc", "stderr_max", *mc.mc_stderr);
    if (p.timing) {
        push(out.table, ex, "method=reference", "walltime_ms", t1 - t0);
        push(out.table, ex, "method=dyson", "walltime_ms", t2 - t1);
        push(out.table, ex, "method=picard", "walltime_ms", t3 - t2);
        push(out.table, ex, "method=poisson_mc", "walltime_ms", t4 - t3);
    }

    if (config.contains("estimates_out")) {
        set_resolved(resolved, "estimates_out", config.at("estimates_out"));
        out.table.header = make_header("compare", resolved);
        out.estimates = json{{"reference", estimate_to_json(ref)},
                             {"dyson", estimate_to_json(dyson)},
                             {"picard", estimate_to_json(picard)},
                             {"poisson_mc", estimate_to_json(mc)}};
    }
    return out;
}

ExperimentResult run_dyson_converge(const json& config) {
    json resolved;
    Cfg cfg(config, resolved);
    const CommonParams p = common_params(cfg);
    const HamiltonianSchedule schedule = schedule_from_cfg(config, resolved);

    const int ref_steps = static_cast<int>(cfg.integer("reference_steps", 10000));
    const int nodes = static_cast<int>(cfg.integer("dyson.nodes", 10));
    const int quad_sectors = static_cast<int>(cfg.integer("dyson.quad_sectors", 4));
    const int tail_steps = static_cast<int>(cfg.integer("dyson.tail_steps", 2048));
    const auto orders = cfg.int_list("orders", {0, 1, 2, 4, 8, 12});

    ExperimentResult out;
    out.table.header = make_header("dyson-converge", resolved);
    const CMatrix ref = reference_propagator(schedule, 0.0, p.t, ref_steps).matrix;
    const double hnorm = schedule.norm_bound();

    std::vector<double> defects;
    for (long long n : orders) {
        const PropagatorEstimate est = vacuum_expectation_dyson(
            schedule, p.t, static_cast<int>(n), nodes, quad_sectors, tail_steps);
        const double defect = max_abs_diff(est.matrix, ref);
        defects.push_back(defect);
        const double bound =
            std::pow(hnorm * p.t, double(n + 1)) / std::tgamma(double(n + 2));
        push(out.table, "dyson-converge", "order=" + std::to_string(n), "defect", defect, bound);
    }

    // defects must be monotone nonincreasing once the order passes ||H|| t
    bool monotone = true;
    for (size_t i = 1; i < orders.size(); ++i)
        if (double(orders[i - 1]) >= hnorm * p.t && defects[i] > defects[i - 1] * (1.0 + 1e-9) &&
            defects[i] > 1e-13)
            monotone = false;
    push(out.table, "dyson-converge", "", "monotone_beyond_norm", monotone ? 1.0 : 0.0);
    if (p.gates && !monotone) out.gates_passed = false;
    return out;
}

ExperimentResult run_mc_sweep(const json& config) {
    json resolved;
    Cfg cfg(config, resolved);
    const CommonParams p = common_params(cfg);
    const HamiltonianSchedule schedule = schedule_from_cfg(config, resolved);
    const IntensityProfile intensity = intensity_from_cfg(config, resolved);

    const int ref_steps = static_cast<int>(cfg.integer("reference_steps", 10000));
    const int batches = static_cast<int>(cfg.integer("mc.batches", 20));
    const auto samples_list = cfg.int_list("samples_list", {1000, 10000, 100000});
    const auto nu_values = cfg.number_list("intensities", {});

    ExperimentResult out;
    out.table.header = make_header("mc-sweep", resolved);
    const CMatrix ref = reference_propagator(schedule, 0.0, p.t, ref_steps).matrix;

    std::vector<double> xs, ses;
    for (long long s : samples_list) {
        const PropagatorEstimate est =
            poisson_expectation_mc(schedule, intensity, p.t, s, p.seed, p.threads, batches);
        const double defect = max_abs_diff(est.matrix, ref);
        push(out.table, "mc-sweep", "samples=" + std::to_string(s), "defect", defect,
             est.mc_stderr);
        push(out.table, "mc-sweep", "samples=" + std::to_string(s), "stderr_max", *est.mc_stderr);
        xs.push_back(double(s));
        ses.push_back(*est.mc_stderr);
    }

    bool ok = true;
    if (samples_list.size() >= 2) {
        const double slope = loglog_slope(xs, ses);
        push(out.table, "mc-sweep", "", "stderr_loglog_slope", slope);
        if (std::abs(slope + 0.5) > 0.1) ok = false;
    }

    // intensity sweep at the largest sample count: the expectation is
    // nu-invariant, so each estimate must sit within 5 stderr of the
    // reference entrywise
    if (!nu_values.empty()) {
        const long long s = samples_list.back();
        for (double nu : nu_values) {
            const IntensityProfile prof = IntensityProfile::constant(nu);
            const PropagatorEstimate est =
                poisson_expectation_mc(schedule, prof, p.t, s, p.seed, p.threads, batches);
            const double defect = max_abs_diff(est.matrix, ref);
            bool within = true;
            const int d = schedule.dim();
            for (int i = 0; i < d && within; ++i)
                for (int j = 0; j < d; ++j) {
                    const double se = est.mc_stderr_entries[static_cast<size_t>(i) * d + j];
                    if (std::abs(est.matrix(i, j) - ref(i, j)) > 5.0 * std::max(se, 1e-300)) {
                        within = false;
                        break;
                    }
                }
            const std::string params = "nu=" + fmt(nu) + ";samples=" + std::to_string(s);
            push(out.table, "mc-sweep", params, "defect", defect, est.mc_stderr);
            push(out.table, "mc-sweep", params, "within_5_stderr", within ? 1.0 : 0.0);
            if (!within) ok = false;
        }
    }
    if (p.gates && !ok) out.gates_passed = false;
    return out;
}

ExperimentResult run_bvp_equivalence(const json& config) {
    json resolved;
    Cfg cfg(config, resolved);
    const CommonParams p = common_params(cfg);
    const HamiltonianSchedule schedule = schedule_from_cfg(config, resolved);

    std::vector<double> default_deltas;
    for (int k = 4; k <= 10; ++k) default_deltas.push_back(std::pow(2.0, -k));
    const auto deltas = cfg.number_list("bvp.deltas", default_deltas);

    Chain chain({1.0 / 3.0, 2.0 / 3.0});
    if (const json* j = cfg.find("bvp.chain")) {
        chain = chain_from_json(*j, "bvp.chain");
        set_resolved(cfg.resolved(), "bvp.chain", *j);
    } else {
        set_resolved(cfg.resolved(), "bvp.chain", chain_to_json(chain));
    }
    const double t = cfg.number("bvp.t", 1.0);
    const double r = cfg.number("bvp.r", 0.25);
    const double cocycle_t = cfg.number("bvp.cocycle_t", 1.0 / 3.0);
    const double probe_x = cfg.number("bvp.probe_x", 7.0 / 16.0);
    const double packet_center = cfg.number("bvp.packet_center", 0.5);
    const double packet_width = cfg.number("bvp.packet_width", 0.08);
    const double packet_t = cfg.number("bvp.packet_t", 0.25);
    const bool wrong_order = cfg.boolean("bvp.wrong_order", false);
    std::optional<std::string> dump_prefix;
    if (const json* dump = cfg.find("bvp.dump_waves")) {
        if (!dump->is_string()) throw ConfigError("bvp.dump_waves: expected a path prefix string");
        dump_prefix = dump->get<std::string>();
        set_resolved(cfg.resolved(), "bvp.dump_waves", *dump);
    }

    ExperimentResult out;
    out.table.header = make_header("bvp-equivalence", resolved);

    std::vector<double> eq, co, di;
    for (double delta : deltas) {
        const double e = equivalence_defect(schedule, chain, t, delta, wrong_order);
        const double c = cocycle_defect(schedule, r, cocycle_t, delta, probe_x);

        const int steps = static_cast<int>(std::lround(packet_t / delta));
        const int half =
            steps + static_cast<int>(std::ceil((packet_center + 6 * packet_width) / delta)) + 4;
        const ExtendedLattice lat(delta, half);
        auto profile = [&](double x) {
            const double z = (x - packet_center) / packet_width;
            return std::exp(-z * z);
        };
        std::vector<cplx> eta(schedule.dim());
        eta[0] = 1.0;
        SectorWave packet = SectorWave::packet_wave(lat, profile, eta);
        const WaveHistory hist = evolve_with_history(packet, schedule, 0.0, steps);
        const double dres = std::max(dirac_residual(hist), boundary_row_defect(hist, schedule));

        if (dump_prefix) {
            // final packet snapshot at this resolution
            SectorWave final_wave = packet;
            evolve(final_wave, schedule, 0.0, steps);
            const std::string path = *dump_prefix + "_delta_" + fmt(delta) + ".csv";
            std::ofstream os(path, std::ios::binary);
            export_csv(final_wave, steps, os, true);
        }

        eq.push_back(e);
        co.push_back(c);
        di.push_back(dres);
        const std::string params = "delta=" + fmt(delta);
        push(out.table, "bvp-equivalence", params, "equivalence_defect", e);
        push(out.table, "bvp-equivalence", params, "cocycle_defect", c);
        push(out.table, "bvp-equivalence", params, "dirac_residual", dres);
    }

    bool ok = true;
    for (size_t i = 1; i < deltas.size(); ++i) {
        const std::string params = "delta=" + fmt(deltas[i]);
        const double re = eq[i] > 0 ? eq[i - 1] / eq[i] : 0.0;
        const double rc = co[i] > 0 ? co[i - 1] / co[i] : 0.0;
        const double rd = di[i] > 0 ? di[i - 1] / di[i] : 0.0;
        push(out.table, "bvp-equivalence", params, "equivalence_ratio", re);
        push(out.table, "bvp-equivalence", params, "cocycle_ratio", rc);
        push(out.table, "bvp-equivalence", params, "dirac_ratio", rd);
        if (!wrong_order && (re < 1.7 || re > 2.3 || rc < 1.7 || rc > 2.3)) ok = false;
    }
    if (p.gates && !ok) out.gates_passed = false;
    out.table.header = make_header("bvp-equivalence", resolved);  // includes late echoes
    return out;
}

ExperimentResult run_invariants(const json& config) {
    json resolved;
    Cfg cfg(config, resolved);
    const CommonParams p = common_params(cfg);

    ExperimentResult out;
    out.table.header = make_header("invariants", resolved);
    bool ok = true;
    auto check = [&](const std::string& name, double value, double threshold) {
        push(out.table, "invariants", "check=" + name, "defect", value, threshold);
        if (!(value <= threshold)) ok = false;
    };

    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto rand_cplx = [&] { return cplx(unif(rng), unif(rng)); };

    // dagger involution and increment algebra
    double inv_defect = 0.0;
    for (int it = 0; it < 64; ++it) {
        ClockMatrix m;
        for (auto& v : m.e) v = rand_cplx();
        inv_defect = std::max(inv_defect, max_abs(dag(dag(m)) - m));
    }
    check("dag_involution", inv_defect, 0.0);
    const ClockMatrix d = ClockMatrix::increment();
    check("increment_nilpotent", max_abs(d * d), 0.0);
    check("increment_self_adjoint", max_abs(dag(d) - d), 0.0);

    // boost pseudo-unitarity
    double boost_defect = 0.0;
    for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0, 9.0}) {
        const ClockMatrix u = lorentz_boost(lambda);
        boost_defect = std::max(boost_defect, max_abs(dag(u) * u - ClockMatrix::identity()));
    }
    check("boost_pseudo_unitary", boost_defect, 1e-12);

    // interaction pseudo-unitarity and the compression identities
    double sigma_defect = 0.0, comp_defect = 0.0, pcomp_defect = 0.0;
    for (int it = 0; it < 16; ++it) {
        CMatrix h(2, 2);
        h(0, 0) = unif(rng);
        h(1, 1) = unif(rng);
        h(0, 1) = rand_cplx();
        h(1, 0) = std::conj(h(0, 1));
        const HamiltonianSchedule sched = HamiltonianSchedule::constant(h);
        const BlockMatrix2 sigma = sigma_at(sched, 0.0);
        const BlockMatrix2 prod = sigma.dag() * sigma;
        const BlockMatrix2 id = BlockMatrix2::identity(2);
        sigma_defect = std::max({sigma_defect, max_abs_diff(prod.a, id.a),
                                 max_abs_diff(prod.b, id.b), max_abs_diff(prod.c, id.c),
                                 max_abs_diff(prod.d, id.d)});
        comp_defect =
            std::max(comp_defect, max_abs_diff(vacuum_compression(sigma), sched.generator(0.0)));
        const double nu = 0.5 + 2.0 * std::abs(unif(rng));
        CMatrix expect = CMatrix::identity(2);
        expect += cplx(1.0 / (2.0 * nu), 0.0) * sched.generator(0.0);
        pcomp_defect = std::max(
            pcomp_defect,
            max_abs_diff(poisson_compression(boost_conjugate(sigma, nu)), expect));
    }
    check("sigma_pseudo_unitary", sigma_defect, 1e-12);
    check("vacuum_compression_identity", comp_defect, 0.0);
    check("poisson_compression_identity", pcomp_defect, 1e-12);

    // pseudo-vacuum coherence and Poisson normalization
    const ProductVector vac = ProductVector::pseudo_vacuum();
    check("pseudo_vacuum_coherence",
          std::abs(fock_pseudo_norm_sq(vac, 1.0, 20) - 1.0), 1e-12);
    const IntensityProfile nu1 = IntensityProfile::constant(1.0);
    double mass = 0.0;
    for (int n = 0; n <= 20; ++n) mass += poisson_sector_mass(nu1, 2.0, 1.0, n);
    check("poisson_normalization", std::abs(mass - 1.0), 1e-10);

    // simplex volumes t^n/n!
    double vol_defect = 0.0;
    auto one = [](const std::vector<double>&) { return cplx(1.0, 0.0); };
    vol_defect = std::max(vol_defect, std::abs(simplex_integrate<cplx>(one, 2, 1.0, 10, cplx{}) - 0.5));
    vol_defect = std::max(vol_defect,
                          std::abs(simplex_integrate<cplx>(one, 3, 2.0, 10, cplx{}) - 8.0 / 6.0));
    check("simplex_volume", vol_defect, 1e-12);

    if (p.gates && !ok) out.gates_passed = false;
    return out;
}

ExperimentResult run_experiment(const json& config) {
    if (!config.is_object()) throw ConfigError("config: expected a JSON object");
    if (!config.contains("experiment")) throw ConfigError("experiment: missing required field");
    const std::string ex = config.at("experiment").get<std::string>();
    if (ex == "compare") return run_compare(config);
    if (ex == "dyson-converge") return run_dyson_converge(config);
    if (ex == "mc-sweep") return run_mc_sweep(config);
    if (ex == "bvp-equivalence") return run_bvp_equivalence(config);
    if (ex == "invariants") return run_invariants(config);
    throw ConfigError("experiment: unknown experiment " + ex);
}

}  // namespace chronon
