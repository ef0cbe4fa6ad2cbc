// experiments.hpp
// Config-driven experiment runner behind the CLI: JSON schema validation
// with named-key errors, dotted-path overrides, seed management, engine
// dispatch, deterministic CSV/JSON artifacts and a run manifest.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "thermalsim/born.hpp"
#include "thermalsim/detectors.hpp"
#include "thermalsim/ehrenfest.hpp"
#include "thermalsim/io.hpp"
#include "thermalsim/spectral.hpp"
#include "thermalsim/stats.hpp"

namespace thermalsim::experiments {

using io::json;

inline constexpr const char* kVersion = "thermalsim 1.0.0";

enum class ParamType { Number, Integer, Boolean, String, NumberArray, MatrixDoc };

struct ParamSpec {
    std::string key;
    ParamType type;
    json def;  // null means optional with no default
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
};

inline const std::vector<ExperimentInfo>& experiment_registry() {
    static const std::vector<ExperimentInfo> registry = {
        {"born",
         "Monte Carlo pointer outcomes reproducing the diagonal qubit weights (§3.4)",
         {{"p", ParamType::Number, 0.5},
          {"alpha_re", ParamType::Number, 0.0},
          {"alpha_im", ParamType::Number, 0.0},
          {"growth_rate", ParamType::Number, 1.0},
          {"noise_scale", ParamType::Number, 0.2},
          {"noise_decay", ParamType::Number, 0.5},
          {"coherence_scale", ParamType::Number, 0.3},
          {"horizon", ParamType::Number, 100.0},
          {"n_steps", ParamType::Integer, 200},
          {"n_runs", ParamType::Integer, 10000},
          {"threshold", ParamType::Number, 0.05}}},
        {"born-universe",
         "exact reduced pointer matrix of a qubit x environment universe (§3.1-3.3)",
         {{"dim_env", ParamType::Integer, 8},
          {"coupling", ParamType::Number, 1.0},
          {"hbar", ParamType::Number, 1.0},
          {"p", ParamType::Number, 0.5},
          {"alpha_re", ParamType::Number, 0.0},
          {"alpha_im", ParamType::Number, 0.0},
          {"t_max", ParamType::Number, 10.0},
          {"n_times", ParamType::Integer, 64}}},
        {"detectors-bucket",
         "quantized Poisson bucket counting of a continuous flow (§4.3-4.4)",
         {{"rate", ParamType::Number, 100.0},
          {"duration", ParamType::Number, 100.0},
          {"bucket_size", ParamType::Number, 1.0},
          {"n_seeds", ParamType::Integer, 1000}}},
        {"detectors-doublewell",
         "bistable overdamped Langevin pointer in a double well (§4.2)",
         {{"barrier", ParamType::Number, 1.0},
          {"noise_temperature", ParamType::Number, 0.05},
          {"time_step", ParamType::Number, 0.02},
          {"n_steps", ParamType::Integer, 100000},
          {"x0", ParamType::Number, 0.0}}},
        {"detectors-ledger",
         "dual error bookkeeping: q-expectation vs nearest eigenvalue (§4.1-4.2)",
         {{"observations", ParamType::NumberArray, json::array()},
          {"rho", ParamType::MatrixDoc, nullptr},
          {"a", ParamType::MatrixDoc, nullptr}}},
        {"detectors-sg",
         "Stern-Gerlach ensemble means and their N^(-1/2) scaling (§5.3-5.4)",
         {{"s_mean", ParamType::Number, 0.0},
          {"ensemble_sizes", ParamType::NumberArray, json::array({100, 1000, 10000})},
          {"replicates", ParamType::Integer, 200}}},
        {"ehrenfest",
         "grid packet dynamics, classical comparison and classicality bound (§2.1)",
         {{"n_points", ParamType::Integer, 1024},
          {"x_min", ParamType::Number, -6.0},
          {"x_max", ParamType::Number, 6.0},
          {"mass", ParamType::Number, 1.0},
          {"hbar", ParamType::Number, 1.0},
          {"potential_type", ParamType::String, "harmonic"},
          {"omega", ParamType::Number, 1.0},
          {"quartic_coefficient", ParamType::Number, 1.0},
          {"potential_samples", ParamType::NumberArray, nullptr},
          {"packet_center", ParamType::Number, 1.0},
          {"packet_width", ParamType::Number, 1.0},
          {"packet_momentum", ParamType::Number, 0.0},
          {"initial_state", ParamType::MatrixDoc, nullptr},
          {"t_max", ParamType::Number, 12.0},
          {"n_times", ParamType::Integer, 512},
          {"third_derivative_bound", ParamType::Number, nullptr}}},
        {"spectrum",
         "level-difference resonance scan and peak recovery (§2.2)",
         {{"levels", ParamType::NumberArray, json::array({0.0, 1.0, 2.5})},
          {"hbar", ParamType::Number, 1.0},
          {"rho", ParamType::MatrixDoc, nullptr},
          {"a", ParamType::MatrixDoc, nullptr},
          {"mass", ParamType::Number, 1.0},
          {"damping", ParamType::Number, 0.02},
          {"omega_min", ParamType::Number, 0.5},
          {"omega_max", ParamType::Number, 3.0},
          {"omega_step", ParamType::Number, 0.002},
          {"prominence", ParamType::Number, 5.0}}},
    };
    return registry;
}

inline const ExperimentInfo& find_experiment(const std::string& name) {
    for (const auto& info : experiment_registry())
        if (info.name == name) return info;
    throw ValidationError("experiment: unknown experiment '" + name + "'");
}

// Stable sorted listing; one line per experiment.
inline std::string list_experiments() {
    std::string out;
    for (const auto& info : experiment_registry()) {
        std::string line = info.name;
        line.resize(22, ' ');
        out += line + info.description + "\n";
    }
    return out;
}

namespace detail {

inline bool type_matches(const json& value, ParamType type) {
    switch (type) {
        case ParamType::Number: return value.is_number();
        case ParamType::Integer: return value.is_number_integer();
        case ParamType::Boolean: return value.is_boolean();
        case ParamType::String: return value.is_string();
        case ParamType::NumberArray: {
            if (!value.is_array()) return false;
            for (const auto& v : value)
                if (!v.is_number()) return false;
            return true;
        }
        case ParamType::MatrixDoc: return value.is_object();
    }
    return false;
}

inline const char* type_name(ParamType type) {
    switch (type) {
        case ParamType::Number: return "number";
        case ParamType::Integer: return "integer";
        case ParamType::Boolean: return "boolean";
        case ParamType::String: return "string";
        case ParamType::NumberArray: return "array of numbers";
        case ParamType::MatrixDoc: return "matrix object {dim, re, im}";
    }
    return "?";
}

}  // namespace detail

// Fully resolved experiment invocation.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    json parameters = json::object();
    unsigned threads = 1;
    bool debug_dump = false;

    json echo() const {
        return json{{"experiment", experiment},
                    {"seed", seed},
                    {"output_dir", output_dir},
                    {"parameters", parameters}};
    }
};

// Validates types, rejects unknown keys, fills defaults. Errors name the
// offending key.
inline json validate_parameters(const ExperimentInfo& info, const json& raw) {
    if (!raw.is_object()) throw ValidationError("parameters: expected a JSON object");
    for (auto it = raw.begin(); it != raw.end(); ++it) {
        bool known = false;
        for (const auto& spec : info.params)
            if (spec.key == it.key()) {
                known = true;
                if (!detail::type_matches(it.value(), spec.type))
                    throw ValidationError("parameters." + spec.key + ": expected " +
                                          detail::type_name(spec.type) + ", got " +
                                          std::string(it.value().type_name()));
                break;
            }
        if (!known)
            throw ValidationError("parameters." + it.key() + ": unknown key for experiment '" +
                                  info.name + "'");
    }
    json resolved = raw;
    for (const auto& spec : info.params)
        if (!resolved.contains(spec.key) && !spec.def.is_null()) resolved[spec.key] = spec.def;
    return resolved;
}

// Parses the config document, applies dotted-path overrides, validates.
// Override keys without a dot that are not top-level fields land in
// parameters; values parse as JSON when possible, else as strings.
inline ExperimentConfig resolve_config(json doc, const std::vector<std::string>& overrides) {
    if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ValidationError("overrides: expected key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        if (key.find('.') == std::string::npos && key != "experiment" && key != "seed" &&
            key != "output_dir")
            key = "parameters." + key;
        json* node = &doc;
        std::size_t pos = 0;
        while (true) {
            const auto dot = key.find('.', pos);
            const std::string part = key.substr(pos, dot - pos);
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            if (!node->is_object()) *node = json::object();
            pos = dot + 1;
        }
    }

    if (!doc.contains("experiment") || !doc.at("experiment").is_string())
        throw ValidationError("experiment: missing or not a string");
    ExperimentConfig config;
    config.experiment = doc.at("experiment").get<std::string>();
    const ExperimentInfo& info = find_experiment(config.experiment);
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer())
            throw ValidationError("seed: expected integer, got " +
                                  std::string(doc.at("seed").type_name()));
        config.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string())
            throw ValidationError("output_dir: expected string");
        config.output_dir = doc.at("output_dir").get<std::string>();
    }
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "experiment" && it.key() != "seed" && it.key() != "output_dir" &&
            it.key() != "parameters")
            throw ValidationError(it.key() + ": unknown top-level key");
    config.parameters =
        validate_parameters(info, doc.contains("parameters") ? doc.at("parameters") : json::object());
    return config;
}

struct RunManifest {
    json config_echo;
    std::vector<std::string> artifact_paths;
    double wall_time = 0.0;
    std::string version = kVersion;

    json to_json() const {
        return json{{"config_echo", config_echo},
                    {"artifact_paths", artifact_paths},
                    {"wall_time", wall_time},
                    {"version", version}};
    }
};

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = (n == 1) ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
    return out;
}

// Integer parameter with a lower bound; rejects before any cast can wrap.
inline std::size_t checked_count(const json& params, const char* key, long long min_value) {
    const auto value = params.at(key).get<long long>();
    if (value < min_value)
        throw ValidationError(std::string("parameters.") + key + ": must be >= " +
                              std::to_string(min_value));
    return static_cast<std::size_t>(value);
}

inline void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot open " + path);
    out << doc.dump(2) << "\n";
}

inline void run_ehrenfest(const ExperimentConfig& cfg, const std::string& dir,
                          std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const int n = p.at("n_points").get<int>();
    const double x_min = p.at("x_min").get<double>();
    const double x_max = p.at("x_max").get<double>();
    const std::string type = p.at("potential_type").get<std::string>();

    std::vector<double> potential(n);
    double third_bound = 0.0;
    const double h = (x_max - x_min) / (n - 1);
    const double span = std::max(std::abs(x_min), std::abs(x_max));
    if (type == "free") {
        // already zero
    } else if (type == "harmonic") {
        const double omega = p.at("omega").get<double>();
        const double m = p.at("mass").get<double>();
        for (int j = 0; j < n; ++j) {
            const double x = x_min + h * j;
            potential[j] = 0.5 * m * omega * omega * x * x;
        }
    } else if (type == "quartic") {
        const double c = p.at("quartic_coefficient").get<double>();
        for (int j = 0; j < n; ++j) {
            const double x = x_min + h * j;
            potential[j] = c * x * x * x * x;
        }
        third_bound = 24.0 * c * span;
    } else if (type == "samples") {
        if (!p.contains("potential_samples"))
            throw ValidationError("parameters.potential_samples: required for potential_type=samples");
        potential = p.at("potential_samples").get<std::vector<double>>();
        if (!p.contains("third_derivative_bound"))
            throw ValidationError(
                "parameters.third_derivative_bound: required for potential_type=samples");
    } else {
        throw ValidationError("parameters.potential_type: expected free|harmonic|quartic|samples");
    }
    if (p.contains("third_derivative_bound"))
        third_bound = p.at("third_derivative_bound").get<double>();

    const ehrenfest::GridSystem sys(n, x_min, x_max, p.at("mass").get<double>(),
                                    p.at("hbar").get<double>(), std::move(potential));
    const PureState psi0 =
        p.contains("initial_state")
            ? io::pure_state_from_json(p.at("initial_state"))
            : ehrenfest::gaussian_packet(sys, p.at("packet_center").get<double>(),
                                         p.at("packet_width").get<double>(),
                                         p.at("packet_momentum").get<double>());
    const auto n_times = checked_count(p, "n_times", 3);
    const auto t_grid = linspace(0.0, p.at("t_max").get<double>(), static_cast<int>(n_times));
    const auto traj = ehrenfest::quantum_expectation_trajectory(sys, psi0, t_grid);
    const auto dev = ehrenfest::classicality_deviation(traj, sys, third_bound);

    const std::string path = dir + "/trajectory.csv";
    io::CsvWriter csv(path, "t,q_mean,p_mean,sigma_q,sigma_p,residual,bound");
    const double nan = std::nan("");
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const bool interior = i >= 1 && i + 1 < traj.times.size();
        csv.row({traj.times[i], traj.q_mean[i], traj.p_mean[i], traj.sigma_q[i], traj.sigma_p[i],
                 interior ? dev.residual[i - 1] : nan, interior ? dev.bound[i - 1] : nan});
    }
    artifacts.push_back(path);
}

inline void run_spectrum(const ExperimentConfig& cfg, const std::string& dir,
                         std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const auto levels = p.at("levels").get<std::vector<double>>();
    const auto d = static_cast<Eigen::Index>(levels.size());

    DensityOperator rho = [&] {
        if (p.contains("rho")) return io::density_from_json(p.at("rho"));
        Vector v = Vector::Constant(d, complexd(1.0, 0.0) / std::sqrt(static_cast<double>(d)));
        return DensityOperator::pure_projector(v);
    }();
    HermitianOperator a = [&] {
        if (p.contains("a")) return io::hermitian_from_json(p.at("a"));
        // default probe: all-ones off-diagonal, no DC response
        Matrix m = Matrix::Constant(d, d, complexd(1.0, 0.0));
        m.diagonal().setZero();
        return HermitianOperator(std::move(m));
    }();

    const spectral::DiscreteSpectrumSystem sys(levels, std::move(rho), std::move(a),
                                               p.at("hbar").get<double>());
    const spectral::OscillatorParams osc(p.at("mass").get<double>(),
                                         p.at("damping").get<double>());
    const double w0 = p.at("omega_min").get<double>();
    const double w1 = p.at("omega_max").get<double>();
    const double dw = p.at("omega_step").get<double>();
    if (!(w0 > 0.0 && w1 > w0 && dw > 0.0))
        throw ValidationError("parameters.omega_min/omega_max/omega_step: need 0 < min < max, step > 0");
    std::vector<double> omegas;
    for (double w = w0; w <= w1 + 1e-12; w += dw) omegas.push_back(w);

    const auto force = spectral::force_decomposition(sys);
    const auto scan = spectral::mean_energy_scan(force, osc, omegas);
    const auto peaks = spectral::recover_spectrum(scan, p.at("prominence").get<double>());

    const std::string scan_path = dir + "/scan.csv";
    io::CsvWriter csv(scan_path, "omega,response");
    for (std::size_t i = 0; i < scan.omegas.size(); ++i)
        csv.row({scan.omegas[i], scan.response[i]});
    artifacts.push_back(scan_path);

    const std::string peaks_path = dir + "/peaks.json";
    write_json_file(peaks_path, json(peaks));
    artifacts.push_back(peaks_path);
}

inline void run_born(const ExperimentConfig& cfg, const std::string& dir,
                     std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const born::QubitState qubit(p.at("p").get<double>(),
                                 complexd(p.at("alpha_re").get<double>(),
                                          p.at("alpha_im").get<double>()));
    const born::EnvironmentTrajectoryModel model(
        p.at("growth_rate").get<double>(), p.at("noise_scale").get<double>(),
        p.at("noise_decay").get<double>(), p.at("coherence_scale").get<double>(),
        p.at("horizon").get<double>(), static_cast<int>(checked_count(p, "n_steps", 2)));
    const std::size_t n_runs = checked_count(p, "n_runs", 1);
    const double threshold = p.at("threshold").get<double>();

    const born::OutcomeTally tally =
        born::born_statistics(qubit, model, n_runs, threshold, cfg.seed, cfg.threads);

    json doc{{"p", qubit.p},
             {"alpha_re", qubit.alpha.real()},
             {"alpha_im", qubit.alpha.imag()},
             {"n_plus", tally.n_plus},
             {"n_minus", tally.n_minus},
             {"n_undecided", tally.n_undecided},
             {"n_total", tally.n_total},
             {"u_ks_statistic", tally.u_ks_statistic},
             {"undecided_warning", tally.undecided_warning},
             {"x_eff", tally.x_eff},
             {"y_eff", tally.y_eff},
             {"z_eff_re", tally.z_eff.real()},
             {"z_eff_im", tally.z_eff.imag()}};
    const std::string tally_path = dir + "/tally.json";
    write_json_file(tally_path, doc);
    artifacts.push_back(tally_path);

    if (cfg.debug_dump) {
        const std::size_t n_dump = std::min<std::size_t>(n_runs, 32);
        for (std::size_t r = 0; r < n_dump; ++r) {
            const auto env = born::sample_environment(model, substream_seed(cfg.seed, r));
            const auto traj = born::pointer_trajectory(qubit, env.signal);
            char name[32];
            std::snprintf(name, sizeof name, "run_%05zu.csv", r);
            const std::string path = dir + "/" + name;
            io::CsvWriter csv(path, "t,xbar,u_hat,v_re,v_im");
            for (std::size_t i = 0; i < traj.times.size(); ++i)
                csv.row({traj.times[i], traj.xbar[i], traj.u_hat[i], traj.v_hat[i].real(),
                         traj.v_hat[i].imag()});
            artifacts.push_back(path);
        }
    }
}

inline void run_born_universe(const ExperimentConfig& cfg, const std::string& dir,
                              std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const born::QubitState qubit(p.at("p").get<double>(),
                                 complexd(p.at("alpha_re").get<double>(),
                                          p.at("alpha_im").get<double>()));
    const auto universe = born::random_small_universe(
        p.at("dim_env").get<Eigen::Index>(), p.at("coupling").get<double>(), cfg.seed,
        p.at("hbar").get<double>());
    const auto t_grid = linspace(0.0, p.at("t_max").get<double>(),
                                 static_cast<int>(checked_count(p, "n_times", 1)));
    const auto signal = born::small_universe_diagnostics(universe, t_grid);
    const auto traj = born::pointer_trajectory(qubit, signal);

    const std::string path = dir + "/diagnostics.csv";
    io::CsvWriter csv(path, "t,xbar,u_hat,v_re,v_im");
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        csv.row({traj.times[i], traj.xbar[i], traj.u_hat[i], traj.v_hat[i].real(),
                 traj.v_hat[i].imag()});
    artifacts.push_back(path);
}

inline void run_detectors_ledger(const ExperimentConfig& cfg, const std::string& dir,
                                 std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    std::vector<double> observations = p.at("observations").get<std::vector<double>>();
    DensityOperator rho = [&] {
        if (p.contains("rho")) return io::density_from_json(p.at("rho"));
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = 1.0;  // pure up state of the worked example
        return DensityOperator(std::move(m));
    }();
    HermitianOperator a = [&] {
        if (p.contains("a")) return io::hermitian_from_json(p.at("a"));
        Matrix m(2, 2);
        m << 6.578, 0.004, 0.004, 6.572;
        return HermitianOperator(std::move(m));
    }();
    if (observations.empty()) {
        // worked default: 20% read 6.57, 80% read 6.58, N = 100
        observations.assign(20, 6.57);
        observations.insert(observations.end(), 80, 6.58);
    }

    const auto ledger = detectors::dual_error_ledger(observations, rho, a);
    const std::string path = dir + "/ledger.csv";
    io::CsvWriter csv(path, "observation,thermal_error,born_error");
    for (std::size_t i = 0; i < observations.size(); ++i)
        csv.row({observations[i], ledger.thermal_errors[i], ledger.born_errors[i]});
    artifacts.push_back(path);

    json doc{{"thermal_true_value", ledger.thermal_true_value},
             {"born_eigenvalues", ledger.born_eigenvalues},
             {"mean_thermal_error", ledger.mean_thermal_error},
             {"mean_born_error", ledger.mean_born_error}};
    const std::string summary = dir + "/summary.json";
    write_json_file(summary, doc);
    artifacts.push_back(summary);
}

inline void run_detectors_bucket(const ExperimentConfig& cfg, const std::string& dir,
                                 std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const double rate = p.at("rate").get<double>();
    const double duration = p.at("duration").get<double>();
    const double bucket = p.at("bucket_size").get<double>();
    const std::size_t n_seeds = checked_count(p, "n_seeds", 1);

    const std::string path = dir + "/bucket.csv";
    io::CsvWriter csv(path, "seed,count,rate_estimate");
    double mean_estimate = 0.0;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const auto result = detectors::bucket_count(rate, duration, bucket,
                                                    substream_seed(cfg.seed, s));
        csv.row({static_cast<double>(s), static_cast<double>(result.count),
                 result.rate_estimate});
        mean_estimate += result.rate_estimate;
    }
    mean_estimate /= static_cast<double>(n_seeds);
    artifacts.push_back(path);

    const std::string summary = dir + "/summary.json";
    write_json_file(summary, json{{"mean_rate_estimate", mean_estimate}, {"rate", rate}});
    artifacts.push_back(summary);
}

inline void run_detectors_doublewell(const ExperimentConfig& cfg, const std::string& dir,
                                     std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const std::size_t n_steps = checked_count(p, "n_steps", 1);
    if (n_steps > 100000000)
        throw ValidationError("parameters.n_steps: above the 1e8 path-length guard");
    const detectors::DoubleWellParams params(
        p.at("barrier").get<double>(), p.at("noise_temperature").get<double>(),
        p.at("time_step").get<double>(), static_cast<int>(n_steps));
    const auto samples = detectors::double_well_pointer(params, p.at("x0").get<double>(),
                                                        cfg.seed);
    const std::string path = dir + "/path.csv";
    io::CsvWriter csv(path, "step,x");
    for (std::size_t i = 0; i < samples.size(); ++i)
        csv.row({static_cast<double>(i), samples[i]});
    artifacts.push_back(path);
}

inline void run_detectors_sg(const ExperimentConfig& cfg, const std::string& dir,
                             std::vector<std::string>& artifacts) {
    const json& p = cfg.parameters;
    const double s_mean = p.at("s_mean").get<double>();
    const auto sizes = p.at("ensemble_sizes").get<std::vector<double>>();
    const std::size_t replicates = checked_count(p, "replicates", 1);
    if (sizes.empty())
        throw ValidationError("parameters.ensemble_sizes: need at least one size");

    const std::string path = dir + "/sweep.csv";
    io::CsvWriter csv(path, "N,replicate,mean");
    json summary = json::object();
    std::vector<double> log_n, log_std;
    std::size_t stream = 0;
    for (double size_raw : sizes) {
        const auto n = static_cast<std::size_t>(size_raw);
        if (n < 1) throw ValidationError("parameters.ensemble_sizes: entries must be >= 1");
        std::vector<double> means;
        means.reserve(replicates);
        for (std::size_t r = 0; r < replicates; ++r) {
            const auto result =
                detectors::stern_gerlach_ensemble(s_mean, n, substream_seed(cfg.seed, stream++));
            means.push_back(result.mean);
            csv.row({static_cast<double>(n), static_cast<double>(r), result.mean});
        }
        const MeanStd stats = mean_std(means);
        summary[std::to_string(n)] = {{"std_of_means", stats.std}, {"mean_of_means", stats.mean}};
        if (stats.std > 0.0) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_std.push_back(std::log(stats.std));
        }
    }
    artifacts.push_back(path);

    json doc{{"per_size", summary}};
    if (log_n.size() >= 2) doc["log_slope"] = regression_slope(log_n, log_std);
    const std::string summary_path = dir + "/summary.json";
    write_json_file(summary_path, doc);
    artifacts.push_back(summary_path);
}

}  // namespace detail

// Runs one experiment, writes its artifacts plus manifest.json under
// config.output_dir, and returns the manifest.
inline RunManifest run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.output_dir);

    RunManifest manifest;
    manifest.config_echo = config.echo();

    const std::string& dir = config.output_dir;
    if (config.experiment == "ehrenfest")
        detail::run_ehrenfest(config, dir, manifest.artifact_paths);
    else if (config.experiment == "spectrum")
        detail::run_spectrum(config, dir, manifest.artifact_paths);
    else if (config.experiment == "born")
        detail::run_born(config, dir, manifest.artifact_paths);
    else if (config.experiment == "born-universe")
        detail::run_born_universe(config, dir, manifest.artifact_paths);
    else if (config.experiment == "detectors-ledger")
        detail::run_detectors_ledger(config, dir, manifest.artifact_paths);
    else if (config.experiment == "detectors-bucket")
        detail::run_detectors_bucket(config, dir, manifest.artifact_paths);
    else if (config.experiment == "detectors-doublewell")
        detail::run_detectors_doublewell(config, dir, manifest.artifact_paths);
    else if (config.experiment == "detectors-sg")
        detail::run_detectors_sg(config, dir, manifest.artifact_paths);
    else
        throw ValidationError("experiment: unknown experiment '" + config.experiment + "'");

    for (const auto& path : manifest.artifact_paths)
        if (!std::filesystem::exists(path))
            throw NumericError("manifest: artifact missing at exit: " + path);

    manifest.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail::write_json_file(dir + "/manifest.json", manifest.to_json());
    return manifest;
}

}  // namespace thermalsim::experiments
