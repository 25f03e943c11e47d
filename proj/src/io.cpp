#include "instanton/io.hpp"

#include "instanton/errors.hpp"
#include "instanton/validation.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace instanton {

static_assert(std::endian::native == std::endian::little,
              "binary outputs assume a little-endian host");

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kProgressInterval = 100;  // iterations between progress lines

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + where + "." + key + "' must be finite");
    return d;
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + where + "." + key + "' must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError("'" + where + "." + key + "' must be a boolean");
    return v.get<bool>();
}

json config_json(const RunConfig& c, bool with_output) {
    json j;
    j["model"] = c.model;
    j["params"] = json::object();
    for (const auto& [k, v] : c.params) j["params"][k] = v;
    json grid = json::object();
    if (c.grid.Nx) grid["Nx"] = *c.grid.Nx;
    if (c.grid.Nt) grid["Nt"] = *c.grid.Nt;
    if (c.grid.T) grid["T"] = *c.grid.T;
    j["grid"] = grid;
    json opt = json::object();
    if (c.tol) opt["tol"] = *c.tol;
    if (c.max_iters) opt["max_iters"] = *c.max_iters;
    if (c.lambda) opt["lambda"] = *c.lambda;
    if (c.memory) opt["memory"] = *c.memory;
    if (c.continuation)
        opt["continuation"] = {{"lambda0", c.continuation->lambda0},
                               {"growth", c.continuation->growth},
                               {"stages", c.continuation->stages}};
    if (c.warmup_disabled)
        opt["warmup"] = false;
    else if (c.warmup)
        opt["warmup"] = {{"lambda", c.warmup->lambda},
                         {"tol", c.warmup->tol},
                         {"max_iters", c.warmup->max_iters}};
    if (c.debug_checks) opt["debug_checks"] = true;
    j["optimizer"] = opt;
    if (with_output)
        j["output"] = {{"dir", c.output_dir},
                       {"checkpoint_interval", c.checkpoint_interval},
                       {"plot_resolution", c.plot_resolution}};
    return j;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --- binary checkpoint -------------------------------------------------------

constexpr char kMagic[8] = {'I', 'N', 'S', 'T', 'C', 'K', 'P', '1'};

class Writer {
public:
    template <class T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put(const std::vector<double>& v) {
        put<std::uint64_t>(v.size());
        os_.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
    void put(const std::string& s) {
        put<std::uint64_t>(s.size());
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    template <class T>
    T get() {
        static_assert(std::is_trivially_copyable_v<T>);
        T v;
        take(&v, sizeof(T));
        return v;
    }
    std::vector<double> get_vector() {
        const auto n = get<std::uint64_t>();
        if (n > (data_.size() - pos_) / sizeof(double)) throw IoError("checkpoint truncated");
        std::vector<double> v(n);
        take(v.data(), n * sizeof(double));
        return v;
    }
    std::string get_string() {
        const auto n = get<std::uint64_t>();
        if (n > data_.size() - pos_) throw IoError("checkpoint truncated");
        std::string s(data_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == data_.size(); }

private:
    void take(void* out, std::size_t n) {
        if (n > data_.size() - pos_) throw IoError("checkpoint truncated");
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }

    std::string data_;
    std::size_t pos_ = 0;
};

void put_evaluation(Writer& w, const Evaluation& e) {
    w.put(e.value);
    w.put(e.gradient);
    w.put(e.aux);
}

Evaluation get_evaluation(Reader& r) {
    Evaluation e;
    e.value = r.get<double>();
    e.gradient = r.get_vector();
    e.aux = r.get_vector();
    return e;
}

} // namespace

std::string RunConfig::to_json() const { return config_json(*this, true).dump(2); }

std::string RunConfig::problem_json() const { return config_json(*this, false).dump(); }

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    check_keys(j, {"model", "params", "grid", "optimizer", "output"}, "");
    RunConfig c;
    if (!j.contains("model") || !j["model"].is_string())
        throw ConfigError("'model' must be given as a string");
    c.model = j["model"].get<std::string>();
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), c.model) == names.end())
        throw ConfigError("unknown model '" + c.model + "'");

    if (j.contains("params")) {
        const json& p = j["params"];
        if (!p.is_object()) throw ConfigError("'params' must be an object");
        const ParameterMap known = make_model(c.model)->parameters();
        for (const auto& [key, value] : p.items()) {
            if (!known.count(key)) throw ConfigError("unknown key 'params." + key + "'");
            c.params[key] = get_number(p, key, "params");
        }
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, {"Nx", "Nt", "T"}, "grid");
        if (g.contains("Nx")) c.grid.Nx = get_int(g, "Nx", "grid");
        if (g.contains("Nt")) c.grid.Nt = get_int(g, "Nt", "grid");
        if (g.contains("T")) c.grid.T = get_number(g, "T", "grid");
    }
    if (j.contains("optimizer")) {
        const json& o = j["optimizer"];
        check_keys(o,
                   {"tol", "max_iters", "lambda", "memory", "continuation", "warmup",
                    "debug_checks"},
                   "optimizer");
        if (o.contains("tol")) c.tol = get_number(o, "tol", "optimizer");
        if (o.contains("max_iters")) c.max_iters = get_int(o, "max_iters", "optimizer");
        if (o.contains("lambda")) c.lambda = get_number(o, "lambda", "optimizer");
        if (o.contains("memory")) c.memory = get_int(o, "memory", "optimizer");
        if (o.contains("debug_checks")) c.debug_checks = get_bool(o, "debug_checks", "optimizer");
        if (o.contains("continuation")) {
            const json& s = o["continuation"];
            check_keys(s, {"lambda0", "growth", "stages"}, "optimizer.continuation");
            Continuation cont;
            const std::string w = "optimizer.continuation";
            if (s.contains("lambda0")) cont.lambda0 = get_number(s, "lambda0", w);
            if (s.contains("growth")) cont.growth = get_number(s, "growth", w);
            if (s.contains("stages")) cont.stages = get_int(s, "stages", w);
            c.continuation = cont;
        }
        if (o.contains("warmup")) {
            const json& s = o["warmup"];
            if (s.is_boolean()) {
                if (s.get<bool>())
                    throw ConfigError("'optimizer.warmup' may be false or an object");
                c.warmup_disabled = true;
            } else {
                check_keys(s, {"lambda", "tol", "max_iters"}, "optimizer.warmup");
                Warmup wu;
                const std::string w = "optimizer.warmup";
                if (s.contains("lambda")) wu.lambda = get_number(s, "lambda", w);
                if (s.contains("tol")) wu.tol = get_number(s, "tol", w);
                if (s.contains("max_iters")) wu.max_iters = get_int(s, "max_iters", w);
                c.warmup = wu;
            }
        }
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        check_keys(o, {"dir", "checkpoint_interval", "plot_resolution"}, "output");
        if (o.contains("dir")) {
            if (!o["dir"].is_string()) throw ConfigError("'output.dir' must be a string");
            c.output_dir = o["dir"].get<std::string>();
        }
        if (o.contains("checkpoint_interval"))
            c.checkpoint_interval = get_int(o, "checkpoint_interval", "output");
        if (o.contains("plot_resolution"))
            c.plot_resolution = get_int(o, "plot_resolution", "output");
    }
    if (c.checkpoint_interval < 0) throw ConfigError("'output.checkpoint_interval' must be >= 0");
    if (c.plot_resolution < 2) throw ConfigError("'output.plot_resolution' must be >= 2");
    return c;
}

RunConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string apply_override(const std::string& json_text, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;  // bare strings such as model names
    }
    json j;
    try {
        j = json_text.empty() ? json::object() : json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("override key '" + path + "' is malformed");
        if (!node->is_object()) throw ConfigError("override '" + path + "' crosses a non-object");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
    return j.dump();
}

ModelPreset build_preset(const RunConfig& config) {
    PresetOverrides o = config.grid;
    o.params = config.params;
    o.lambda = config.lambda;
    o.tol = config.tol;
    return preset(config.model, o);
}

OptimizerConfig build_optimizer(const RunConfig& config, const ModelPreset& p) {
    OptimizerConfig c = p.optimizer();
    if (config.max_iters) c.lbfgs.max_iters = *config.max_iters;
    if (config.memory) c.lbfgs.memory = *config.memory;
    c.continuation = config.continuation;
    if (config.warmup_disabled) c.warmup.reset();
    else if (config.warmup) c.warmup = config.warmup;
    c.debug_checks = config.debug_checks;
    c.validate();
    return c;
}

void write_atomic(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw IoError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename to '" + path.string() + "': " + ec.message());
}

void write_trajectory(const fs::path& dir, const std::string& name, const Trajectory& t,
                      const TimeGrid& grid, const SpatialDomain& domain) {
    const auto v = t.values();
    write_atomic(dir / (name + ".bin"),
                 std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double)));
    const json shape = {{"name", name},
                        {"dtype", "float64"},
                        {"byte_order", "little"},
                        {"layout", {"time", "component", "space"}},
                        {"shape", {t.nodes(), t.components(), t.points()}},
                        {"T", grid.final_time()},
                        {"dt", grid.dt()},
                        {"length", domain.length},
                        {"boundary", std::string(to_string(domain.bc))}};
    write_atomic(dir / (name + ".shape.json"), shape.dump(2) + "\n");
}

Trajectory read_trajectory(const fs::path& bin_path) {
    fs::path sidecar = bin_path;
    sidecar.replace_extension(".shape.json");
    json shape;
    try {
        shape = json::parse(read_file(sidecar));
    } catch (const json::exception& e) {
        throw IoError("bad sidecar '" + sidecar.string() + "': " + e.what());
    }
    const auto dims = shape.at("shape").get<std::vector<int>>();
    if (dims.size() != 3) throw IoError("sidecar shape must have three entries");
    Trajectory t(dims[0], dims[1], dims[2]);
    const std::string data = read_file(bin_path);
    if (data.size() != t.values().size() * sizeof(double))
        throw IoError("'" + bin_path.string() + "' does not match its shape");
    std::memcpy(t.values().data(), data.data(), data.size());
    return t;
}

std::string downsampled_csv(const Trajectory& t, const TimeGrid& grid,
                            const SpatialDomain& domain, int max_rows, int max_cols) {
    auto sample = [](int n, int limit) {
        std::vector<int> idx;
        if (n <= limit) {
            for (int i = 0; i < n; ++i) idx.push_back(i);
        } else {
            for (int i = 0; i < limit; ++i)
                idx.push_back(static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / (limit - 1))));
        }
        return idx;
    };
    const auto rows = sample(t.nodes(), max_rows);
    const auto cols = sample(t.points(), std::max(1, max_cols / t.components()));
    const auto x = domain.coordinates();
    std::ostringstream os;
    os.precision(17);
    os << "t";
    for (int c = 0; c < t.components(); ++c)
        for (int i : cols) os << ",c" << c << "@" << x[static_cast<std::size_t>(i)];
    os << "\n";
    for (int k : rows) {
        const Field f = t.node(k);
        os << grid.node(k);
        for (int c = 0; c < t.components(); ++c)
            for (int i : cols) os << "," << f(c, i);
        os << "\n";
    }
    return os.str();
}

void save_checkpoint(const fs::path& path, const SolverCheckpoint& cp,
                     const std::string& config_echo) {
    Writer w;
    for (char ch : kMagic) w.put(ch);
    w.put(config_echo);
    w.put<std::int32_t>(cp.stage);
    w.put<std::int32_t>(cp.evaluations);
    const LbfgsState& s = cp.state;
    w.put<std::int32_t>(s.iteration);
    w.put(s.x);
    put_evaluation(w, s.current);
    w.put<std::uint64_t>(s.s.size());
    for (std::size_t i = 0; i < s.s.size(); ++i) {
        w.put(s.s[i]);
        w.put(s.y[i]);
    }
    w.put<std::uint64_t>(s.history.size());
    for (const auto& h : s.history) {
        w.put<std::int32_t>(h.iteration);
        w.put(h.value);
        w.put(h.grad_norm);
        w.put(h.aux);
    }
    w.put<std::uint64_t>(cp.completed.size());
    for (const auto& st : cp.completed) {
        w.put(st.lambda);
        w.put<std::uint8_t>(st.warmup ? 1 : 0);
        w.put<std::int32_t>(static_cast<std::int32_t>(st.status));
        w.put<std::int32_t>(st.iterations);
        w.put(st.action);
        w.put(st.endpoint_error);
    }
    w.put<std::uint64_t>(cp.history.size());
    for (const auto& h : cp.history) {
        w.put<std::int32_t>(h.stage);
        w.put<std::int32_t>(h.iteration);
        w.put(h.lambda);
        w.put(h.value);
        w.put(h.grad_norm);
        w.put(h.action);
        w.put(h.endpoint_error);
    }
    write_atomic(path, w.str());
}

std::optional<SolverCheckpoint> load_checkpoint(const fs::path& path,
                                                const std::string& config_echo) {
    if (!fs::exists(path)) return std::nullopt;
    Reader r(read_file(path));
    for (char ch : kMagic)
        if (r.get<char>() != ch) throw IoError("'" + path.string() + "' is not a checkpoint");
    if (r.get_string() != config_echo)
        throw ConfigError("checkpoint '" + path.string() +
                          "' was written for a different configuration");
    SolverCheckpoint cp;
    cp.stage = r.get<std::int32_t>();
    cp.evaluations = r.get<std::int32_t>();
    LbfgsState& s = cp.state;
    s.iteration = r.get<std::int32_t>();
    s.x = r.get_vector();
    s.current = get_evaluation(r);
    const auto pairs = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < pairs; ++i) {
        s.s.push_back(r.get_vector());
        s.y.push_back(r.get_vector());
    }
    const auto records = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < records; ++i) {
        IterationRecord h;
        h.iteration = r.get<std::int32_t>();
        h.value = r.get<double>();
        h.grad_norm = r.get<double>();
        h.aux = r.get_vector();
        s.history.push_back(std::move(h));
    }
    const auto stages = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < stages; ++i) {
        StageSummary st;
        st.lambda = r.get<double>();
        st.warmup = r.get<std::uint8_t>() != 0;
        const auto status = r.get<std::int32_t>();
        if (status < 0 || status > 2) throw IoError("checkpoint has an invalid stage status");
        st.status = static_cast<OptimizerStatus>(status);
        st.iterations = r.get<std::int32_t>();
        st.action = r.get<double>();
        st.endpoint_error = r.get<double>();
        cp.completed.push_back(st);
    }
    const auto entries = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < entries; ++i) {
        HistoryEntry h;
        h.stage = r.get<std::int32_t>();
        h.iteration = r.get<std::int32_t>();
        h.lambda = r.get<double>();
        h.value = r.get<double>();
        h.grad_norm = r.get<double>();
        h.action = r.get<double>();
        h.endpoint_error = r.get<double>();
        cp.history.push_back(h);
    }
    if (!r.done()) throw IoError("'" + path.string() + "' has trailing data");
    return cp;
}

namespace {

std::string convergence_csv(const std::vector<HistoryEntry>& history) {
    std::ostringstream os;
    os.precision(17);
    os << "stage,iter,lambda,J,grad_norm,action,endpoint_error\n";
    for (const auto& h : history)
        os << h.stage << "," << h.iteration << "," << h.lambda << "," << h.value << ","
           << h.grad_norm << "," << h.action << "," << h.endpoint_error << "\n";
    return os.str();
}

std::string hamiltonian_csv(const std::vector<double>& h, const TimeGrid& grid) {
    std::ostringstream os;
    os.precision(17);
    os << "t,H\n";
    for (std::size_t k = 0; k < h.size(); ++k)
        os << grid.node(static_cast<int>(k)) << "," << h[k] << "\n";
    return os.str();
}

json stage_json(const StageSummary& s) {
    return {{"lambda", s.lambda},
            {"warmup", s.warmup},
            {"status", std::string(to_string(s.status))},
            {"iterations", s.iterations},
            {"action", number_or_null(s.action)},
            {"endpoint_error", number_or_null(s.endpoint_error)}};
}

} // namespace

int run(const RunConfig& config, const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };
    const fs::path dir = config.output_dir;
    const fs::path checkpoint_path = dir / "checkpoint.bin";
    json meta;
    meta["config"] = json::parse(config.to_json());

    try {
        ModelPreset p = build_preset(config);
        const OptimizerConfig optimizer = build_optimizer(config, p);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

        const std::string echo = config.problem_json();
        std::optional<SolverCheckpoint> resume = load_checkpoint(checkpoint_path, echo);
        if (options.require_resume && !resume)
            throw IoError("no checkpoint in '" + dir.string() + "' to resume from");
        meta["resumed"] = resume.has_value();
        meta["model"] = {{"name", p.model->name()},
                         {"parameters", p.model->parameters()},
                         {"equations", p.model->equations()}};
        meta["grid"] = {{"T", p.T},
                        {"Nt", p.Nt},
                        {"dt", p.grid().dt()},
                        {"Nx", p.Nx},
                        {"length", p.model->domain().length},
                        {"boundary", std::string(to_string(p.model->domain().bc))}};
        meta["filter"] = p.filter.describe();

        InstantonProblem problem = p.problem();
        CheckpointCallback on_iteration;
        if (config.checkpoint_interval > 0 || !options.quiet) {
            on_iteration = [&](const SolverCheckpoint& cp) {
                const int it = cp.state.iteration;
                if (config.checkpoint_interval > 0 && it % config.checkpoint_interval == 0)
                    save_checkpoint(checkpoint_path, cp, echo);
                if (!options.quiet && it % kProgressInterval == 0 && !cp.history.empty()) {
                    const HistoryEntry& h = cp.history.back();
                    std::cerr << "  stage " << h.stage << " iter " << h.iteration
                              << "  J=" << h.value << "  |grad|=" << h.grad_norm
                              << "  action=" << h.action << "  endpoint=" << h.endpoint_error
                              << "  t=" << elapsed() << "s\n";
                }
            };
        }
        if (!options.quiet)
            std::cerr << "solving " << p.name << " (Nt=" << p.Nt << ", Nx=" << p.Nx
                      << ", lambda=" << p.lambda << ", tol=" << optimizer.lbfgs.tol << ")\n";
        InstantonResult r;
        try {
            r = solve_instanton(problem, optimizer, resume ? &*resume : nullptr, on_iteration);
        } catch (const SolverError& e) {
            meta["status"] = "solver_error";
            meta["error"] = e.what();
            meta["error_time_index"] = e.time_index();
            meta["wall_time"] = elapsed();
            write_atomic(dir / "meta.json", meta.dump(2) + "\n");
            if (!options.quiet) std::cerr << "solver failure: " << e.what() << "\n";
            return exit_solver;
        }

        const TimeGrid grid = p.grid();
        const SpatialDomain& domain = p.model->domain();
        write_atomic(dir / "convergence.csv", convergence_csv(r.history));
        write_atomic(dir / "hamiltonian.csv", hamiltonian_csv(r.hamiltonian, grid));
        write_trajectory(dir, "phi", r.phi, grid, domain);
        write_trajectory(dir, "theta", r.theta, grid, domain);
        write_trajectory(dir, "mu", r.mu, grid, domain);
        const NoiseTrajectory noise = optimal_noise(*p.model, r.phi, r.mu);
        write_trajectory(dir, "noise", noise.values, grid, domain);
        write_atomic(dir / "phi.csv", downsampled_csv(r.phi, grid, domain, config.plot_resolution,
                                                      config.plot_resolution));
        write_atomic(dir / "mu.csv", downsampled_csv(r.mu, grid, domain, config.plot_resolution,
                                                     config.plot_resolution));

        meta["status"] = std::string(to_string(r.status));
        meta["value"] = number_or_null(r.value);
        meta["action"] = number_or_null(r.action);
        meta["penalty"] = number_or_null(r.penalty);
        meta["endpoint_error"] = number_or_null(r.endpoint_error);
        meta["grad_norm"] = number_or_null(r.grad_norm);
        meta["lambda"] = r.lambda;
        meta["iterations"] = r.iterations;
        meta["evaluations"] = r.evaluations;
        meta["stages"] = json::array();
        for (const auto& s : r.stages) meta["stages"].push_back(stage_json(s));
        meta["hamiltonian_drift"] =
            number_or_null(hamiltonian_drift(*p.model, r.phi, r.mu, 0.0).value);
        meta["noise_residual"] = number_or_null(noise_residual(*p.model, r.phi, r.theta, r.mu));
        meta["time_shift_sensitivity"] = number_or_null(r.time_shift_sensitivity);
        meta["noise_is_covariance_form"] = noise.covariance_form;
        meta["wall_time"] = elapsed();
        write_atomic(dir / "meta.json", meta.dump(2) + "\n");
        fs::remove(checkpoint_path, ec);
        if (!options.quiet)
            std::cerr << "status " << to_string(r.status) << ", action " << r.action
                      << ", endpoint error " << r.endpoint_error << "\n";
        switch (r.status) {
        case OptimizerStatus::converged: return exit_converged;
        case OptimizerStatus::max_iters: return exit_max_iters;
        case OptimizerStatus::linesearch_failure: return exit_solver;
        }
        return exit_solver;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return exit_solver;
    }
}

} // namespace instanton
