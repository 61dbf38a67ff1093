#include "fenc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fenc::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

void append_doubles(std::string& out, std::span<const double> values) {
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
}

void append_matrix(std::string& out, const Matrix& m) {
    out += '[';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) out += ',';
        append_doubles(out, std::span<const double>(m.row(r), m.cols()));
    }
    out += ']';
}

void append_quoted(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

void append_size_array(std::string& out, const std::vector<std::size_t>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    out += ']';
}

void append_mlp(std::string& out, const Mlp& net) {
    out += '[';
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const auto& layer = net.layers()[l];
        if (l) out += ',';
        out += "{\"w\":";
        append_matrix(out, layer.w);
        out += ",\"b\":";
        append_doubles(out, layer.b);
        out += '}';
    }
    out += ']';
}

void parse_mlp_params(const json& arr, Mlp& net) {
    require(arr.is_array() && arr.size() == net.layers().size(),
            "checkpoint: layer count mismatch");
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        auto& layer = net.layers()[l];
        const auto& w = arr[l].at("w");
        require(w.size() == layer.out_dim(), "checkpoint: weight rows mismatch");
        for (std::size_t r = 0; r < layer.out_dim(); ++r) {
            require(w[r].size() == layer.in_dim(), "checkpoint: weight cols mismatch");
            for (std::size_t c = 0; c < layer.in_dim(); ++c) {
                layer.w(r, c) = w[r][c].get<double>();
            }
        }
        const auto& b = arr[l].at("b");
        require(b.size() == layer.b.size(), "checkpoint: bias size mismatch");
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
            layer.b[i] = b[i].get<double>();
        }
    }
}

std::string meta_json(const NetConfig& cfg, const std::string& model,
                      std::uint64_t seed) {
    std::string out = "{\"schema_version\":1,\"model\":";
    append_quoted(out, model);
    out += ",\"obs_dim\":" + std::to_string(cfg.obs_dim);
    out += ",\"trunk_hidden\":";
    append_size_array(out, cfg.trunk_hidden);
    out += ",\"k\":" + std::to_string(cfg.k);
    out += ",\"action_dim\":" + std::to_string(cfg.action_dim);
    out += ",\"activation\":";
    append_quoted(out, activation_name(cfg.activation));
    out += ",\"residual_trunk\":";
    out += cfg.residual_trunk ? "true" : "false";
    out += ",\"head_mode\":";
    append_quoted(out, head_mode_name(cfg.head_mode));
    out += ",\"head_hidden\":";
    append_size_array(out, cfg.head_hidden);
    out += ",\"head_init_gain\":" + format_double(cfg.head_init_gain);
    out += ",\"fourier_features\":" + std::to_string(cfg.fourier_features);
    out += ",\"fourier_base\":" + format_double(cfg.fourier_base);
    out += ",\"seed\":" + std::to_string(seed);
    out += '}';
    return out;
}

NetConfig net_config_from_meta(const json& meta) {
    NetConfig cfg;
    cfg.obs_dim = meta.at("obs_dim").get<std::size_t>();
    cfg.trunk_hidden = meta.at("trunk_hidden").get<std::vector<std::size_t>>();
    cfg.k = meta.at("k").get<std::size_t>();
    cfg.action_dim = meta.at("action_dim").get<std::size_t>();
    cfg.activation = activation_from_name(meta.at("activation").get<std::string>());
    cfg.residual_trunk = meta.at("residual_trunk").get<bool>();
    cfg.head_mode = head_mode_from_name(meta.at("head_mode").get<std::string>());
    cfg.head_hidden = meta.at("head_hidden").get<std::vector<std::size_t>>();
    cfg.head_init_gain = meta.at("head_init_gain").get<double>();
    cfg.fourier_features = meta.value("fourier_features", std::size_t{0});
    cfg.fourier_base = meta.value("fourier_base", 1.0);
    return cfg;
}

}  // namespace

void save_basis_checkpoint(const std::string& path, const BasisNetwork& net,
                           std::uint64_t seed) {
    std::string out = "{\"meta\":" + meta_json(net.config(), "basis", seed);
    out += ",\"params\":{\"trunk\":";
    append_mlp(out, net.trunk());
    out += ",\"heads\":[";
    for (std::size_t h = 0; h < net.heads().size(); ++h) {
        if (h) out += ',';
        append_mlp(out, net.heads()[h]);
    }
    out += "]}}\n";
    write_file(path, out);
}

BasisNetwork load_basis_checkpoint(const std::string& path) {
    const json doc = json::parse(read_file(path));
    const auto& meta = doc.at("meta");
    require(meta.at("model").get<std::string>() == "basis",
            "checkpoint: not a basis network");
    const NetConfig cfg = net_config_from_meta(meta);
    Prng rng(0);  // structure only; parameters are overwritten below
    BasisNetwork net = BasisNetwork::create(cfg, rng);
    parse_mlp_params(doc.at("params").at("trunk"), net.trunk());
    const auto& heads = doc.at("params").at("heads");
    require(heads.size() == net.heads().size(), "checkpoint: head count mismatch");
    for (std::size_t h = 0; h < net.heads().size(); ++h) {
        parse_mlp_params(heads[h], net.heads()[h]);
    }
    return net;
}

void save_monolithic_checkpoint(const std::string& path,
                                const MonolithicNetwork& net, std::uint64_t seed) {
    std::string out = "{\"meta\":" + meta_json(net.config(), "monolithic", seed);
    out += ",\"params\":{\"trunk\":";
    append_mlp(out, net.trunk());
    out += ",\"head\":";
    append_mlp(out, net.head());
    out += "}}\n";
    write_file(path, out);
}

MonolithicNetwork load_monolithic_checkpoint(const std::string& path) {
    const json doc = json::parse(read_file(path));
    const auto& meta = doc.at("meta");
    require(meta.at("model").get<std::string>() == "monolithic",
            "checkpoint: not a monolithic network");
    const NetConfig cfg = net_config_from_meta(meta);
    Prng rng(0);
    MonolithicNetwork net = MonolithicNetwork::create(cfg, rng);
    parse_mlp_params(doc.at("params").at("trunk"), net.trunk());
    parse_mlp_params(doc.at("params").at("head"), net.head());
    return net;
}

namespace {

std::string world_config_json(const worlds::WorldConfig& cfg) {
    std::string out = "{\"kind\":";
    append_quoted(out, cfg.kind);
    out += ",\"train_contexts\":" + std::to_string(cfg.train_contexts);
    out += ",\"holdout_contexts\":" + std::to_string(cfg.holdout_contexts);
    out += ",\"seed\":" + std::to_string(cfg.seed);
    out += ",\"trajectories_per_context\":" +
           std::to_string(cfg.trajectories_per_context);
    out += ",\"horizon\":" + std::to_string(cfg.horizon);
    out += ",\"step_size\":" + format_double(cfg.step_size);
    out += ",\"samples_per_context\":" + std::to_string(cfg.samples_per_context);
    out += ",\"coeff_range\":" + format_double(cfg.coeff_range);
    out += ",\"noise_scale\":" + format_double(cfg.noise_scale);
    out += '}';
    return out;
}

worlds::WorldConfig world_config_from_json(const json& j) {
    worlds::WorldConfig cfg;
    cfg.kind = j.value("kind", cfg.kind);
    cfg.train_contexts = j.value("train_contexts", cfg.train_contexts);
    cfg.holdout_contexts = j.value("holdout_contexts", cfg.holdout_contexts);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.trajectories_per_context =
        j.value("trajectories_per_context", cfg.trajectories_per_context);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.step_size = j.value("step_size", cfg.step_size);
    cfg.samples_per_context = j.value("samples_per_context", cfg.samples_per_context);
    cfg.coeff_range = j.value("coeff_range", cfg.coeff_range);
    cfg.noise_scale = j.value("noise_scale", cfg.noise_scale);
    return cfg;
}

std::string sample_jsonl_line(const std::string& ctx, const Sample& s) {
    std::string out = "{\"ctx\":";
    append_quoted(out, ctx);
    out += ",\"traj\":" + std::to_string(s.traj);
    out += ",\"t\":" + std::to_string(s.t);
    out += ",\"obs\":";
    append_doubles(out, s.obs);
    out += ",\"act\":";
    append_doubles(out, s.act);
    out += "}\n";
    return out;
}

std::string dataset_jsonl(const ContextDataset& ds) {
    std::string out;
    for (const auto& s : ds.samples) out += sample_jsonl_line(ds.context_id, s);
    return out;
}

ContextDataset dataset_from_jsonl(const std::string& content) {
    ContextDataset ds;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (ds.context_id.empty()) ds.context_id = j.at("ctx").get<std::string>();
        Sample s;
        s.traj = j.at("traj").get<std::uint32_t>();
        s.t = j.at("t").get<std::uint32_t>();
        s.obs = j.at("obs").get<std::vector<double>>();
        s.act = j.at("act").get<std::vector<double>>();
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

}  // namespace

void save_dataset(const std::string& dir, const worlds::GeneratedData& data) {
    fs::create_directories(dir);
    std::string manifest = "{\"schema_version\":1,\"world\":";
    manifest += world_config_json(data.config);
    manifest += ",\"contexts\":[";
    bool first = true;
    auto add_context = [&](const std::string& id, const std::string& split) {
        if (!first) manifest += ',';
        first = false;
        manifest += "{\"id\":";
        append_quoted(manifest, id);
        manifest += ",\"split\":";
        append_quoted(manifest, split);
        if (const auto* g = data.find_grid_context(id)) {
            manifest += ",\"theta\":" + format_double(g->theta);
            manifest += ",\"scale\":" + format_double(g->scale);
        }
        if (const auto* f = data.find_fn1d_context(id)) {
            manifest += ",\"a\":" + format_double(f->a);
            manifest += ",\"b\":" + format_double(f->b);
            manifest += ",\"d\":" + format_double(f->d);
        }
        manifest += '}';
    };
    for (const auto& ds : data.train) {
        add_context(ds.context_id, "train");
        write_file((fs::path(dir) / (ds.context_id + ".jsonl")).string(),
                   dataset_jsonl(ds));
    }
    for (const auto& ds : data.holdout) {
        add_context(ds.context_id, "ood");
        write_file((fs::path(dir) / (ds.context_id + ".jsonl")).string(),
                   dataset_jsonl(ds));
    }
    manifest += "]}\n";
    write_file((fs::path(dir) / "manifest.json").string(), manifest);
}

worlds::GeneratedData load_dataset(const std::string& dir) {
    const json manifest = json::parse(read_file((fs::path(dir) / "manifest.json").string()));
    worlds::GeneratedData data;
    data.config = world_config_from_json(manifest.at("world"));
    for (const auto& entry : manifest.at("contexts")) {
        const auto id = entry.at("id").get<std::string>();
        const auto split = entry.at("split").get<std::string>();
        auto ds = dataset_from_jsonl(
            read_file((fs::path(dir) / (id + ".jsonl")).string()));
        ds.context_id = id;
        if (data.config.kind == "grid") {
            worlds::GridContext ctx;
            ctx.context_id = id;
            ctx.theta = entry.at("theta").get<double>();
            ctx.scale = entry.at("scale").get<double>();
            data.grid_contexts.push_back(std::move(ctx));
        } else {
            worlds::FunctionContext1D ctx;
            ctx.context_id = id;
            ctx.a = entry.at("a").get<double>();
            ctx.b = entry.at("b").get<double>();
            ctx.d = entry.at("d").get<double>();
            data.fn1d_contexts.push_back(std::move(ctx));
        }
        (split == "train" ? data.train : data.holdout).push_back(std::move(ds));
    }
    return data;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
    std::string out;
    for (const auto& s : traj.steps) out += sample_jsonl_line(traj.context_id, s);
    write_file(path, out);
}

Trajectory load_trajectory(const std::string& path) {
    const auto ds = dataset_from_jsonl(read_file(path));
    Trajectory traj;
    traj.context_id = ds.context_id;
    traj.steps = ds.samples;
    return traj;
}

void write_history_csv(const std::string& path,
                       const std::vector<StepStats>& history) {
    std::string out = "step,loss_l1,loss_reg,lr\n";
    for (const auto& h : history) {
        out += std::to_string(h.step);
        out += ',';
        out += format_double(h.loss_l1);
        out += ',';
        out += format_double(h.loss_reg);
        out += ',';
        out += format_double(h.lr);
        out += '\n';
    }
    write_file(path, out);
}

void write_coefficients_json(
    const std::string& path,
    const std::vector<std::pair<std::uint64_t, CoefficientTable>>& snapshots) {
    std::string out = "{\"schema_version\":1,\"snapshots\":[";
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (i) out += ',';
        out += "{\"step\":" + std::to_string(snapshots[i].first) + ",\"alpha\":{";
        bool first = true;
        for (const auto& [id, entry] : snapshots[i].second) {
            if (!first) out += ',';
            first = false;
            append_quoted(out, id);
            out += ':';
            append_doubles(out, entry.alpha);
        }
        out += "}}";
    }
    out += "]}\n";
    write_file(path, out);
}

void write_report_csv(const std::string& path, const analysis::EvalReport& report) {
    std::string out = "context_id,split,mean_l1,n\n";
    for (const auto& row : report.rows) {
        out += row.context_id;
        out += ',';
        out += row.split;
        out += ',';
        out += format_double(row.mean_l1);
        out += ',';
        out += std::to_string(row.n);
        out += '\n';
    }
    write_file(path, out);
}

void write_report_json(const std::string& path, const analysis::EvalReport& report) {
    std::string out = "{\"schema_version\":1,\"protocol\":";
    append_quoted(out, report.protocol);
    out += ",\"calib_samples\":" + std::to_string(report.calib_samples);
    out += ",\"aggregate_train\":" + format_double(report.aggregate_train);
    out += ",\"aggregate_ood\":" + format_double(report.aggregate_ood);
    out += ",\"rows\":[";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        if (i) out += ',';
        out += "{\"context_id\":";
        append_quoted(out, row.context_id);
        out += ",\"split\":";
        append_quoted(out, row.split);
        out += ",\"mean_l1\":" + format_double(row.mean_l1);
        out += ",\"n\":" + std::to_string(row.n);
        out += ",\"alpha\":";
        append_doubles(out, row.alpha);
        out += '}';
    }
    out += "]}\n";
    write_file(path, out);
}

void write_alpha_json(const std::string& path, const CoefficientVector& coeff,
                      const std::optional<std::string>& context_id,
                      std::optional<double> wall_ms) {
    std::string out = "{\"context_id\":";
    if (context_id) {
        append_quoted(out, *context_id);
    } else {
        out += "null";
    }
    out += ",\"alpha\":";
    append_doubles(out, coeff.values);
    out += ",\"k\":" + std::to_string(coeff.k());
    out += ",\"solver_objective\":" + format_double(coeff.objective);
    out += ",\"n_samples\":" + std::to_string(coeff.n_samples);
    out += ",\"wall_ms\":";
    out += wall_ms ? format_double(*wall_ms) : "null";
    out += "}\n";
    write_file(path, out);
}

CoefficientVector load_alpha_json(const std::string& path,
                                  std::optional<std::string>* context_id) {
    const json doc = json::parse(read_file(path));
    CoefficientVector coeff;
    coeff.values = doc.at("alpha").get<std::vector<double>>();
    coeff.objective = doc.at("solver_objective").get<double>();
    coeff.n_samples = doc.value("n_samples", std::size_t{0});
    if (context_id) {
        if (doc.at("context_id").is_null()) {
            *context_id = std::nullopt;
        } else {
            *context_id = doc.at("context_id").get<std::string>();
        }
    }
    return coeff;
}

void write_projection_csv(const std::string& path,
                          const analysis::Projection2D& proj) {
    std::string out = "context_id,x,y\n";
    for (const auto& p : proj.points) {
        out += p.context_id;
        out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += '\n';
    }
    write_file(path, out);
}

namespace {

std::string net_config_json(const NetConfig& cfg) {
    std::string out = "{\"obs_dim\":" + std::to_string(cfg.obs_dim);
    out += ",\"trunk_hidden\":";
    append_size_array(out, cfg.trunk_hidden);
    out += ",\"k\":" + std::to_string(cfg.k);
    out += ",\"action_dim\":" + std::to_string(cfg.action_dim);
    out += ",\"activation\":";
    append_quoted(out, activation_name(cfg.activation));
    out += ",\"residual_trunk\":";
    out += cfg.residual_trunk ? "true" : "false";
    out += ",\"head_mode\":";
    append_quoted(out, head_mode_name(cfg.head_mode));
    out += ",\"head_hidden\":";
    append_size_array(out, cfg.head_hidden);
    out += ",\"head_init_gain\":" + format_double(cfg.head_init_gain);
    out += ",\"fourier_features\":" + std::to_string(cfg.fourier_features);
    out += ",\"fourier_base\":" + format_double(cfg.fourier_base);
    out += '}';
    return out;
}

NetConfig net_config_from_json(const json& j) {
    NetConfig cfg;
    cfg.obs_dim = j.value("obs_dim", cfg.obs_dim);
    if (j.contains("trunk_hidden")) {
        cfg.trunk_hidden = j.at("trunk_hidden").get<std::vector<std::size_t>>();
    }
    cfg.k = j.value("k", cfg.k);
    cfg.action_dim = j.value("action_dim", cfg.action_dim);
    if (j.contains("activation")) {
        cfg.activation = activation_from_name(j.at("activation").get<std::string>());
    }
    cfg.residual_trunk = j.value("residual_trunk", cfg.residual_trunk);
    if (j.contains("head_mode")) {
        cfg.head_mode = head_mode_from_name(j.at("head_mode").get<std::string>());
    }
    if (j.contains("head_hidden")) {
        cfg.head_hidden = j.at("head_hidden").get<std::vector<std::size_t>>();
    }
    cfg.head_init_gain = j.value("head_init_gain", cfg.head_init_gain);
    cfg.fourier_features = j.value("fourier_features", cfg.fourier_features);
    cfg.fourier_base = j.value("fourier_base", cfg.fourier_base);
    return cfg;
}

std::string train_config_json(const TrainConfig& cfg) {
    std::string out = "{\"k\":" + std::to_string(cfg.k);
    out += ",\"lr\":" + format_double(cfg.lr);
    out += ",\"adam_eps\":" + format_double(cfg.adam_eps);
    out += ",\"warmup_steps\":" + std::to_string(cfg.warmup_steps);
    out += ",\"total_steps\":" + std::to_string(cfg.total_steps);
    out += ",\"batch_size\":" + std::to_string(cfg.batch_size);
    out += ",\"recalibration_period\":" + std::to_string(cfg.recalibration_period);
    out += ",\"buffer_capacity\":" + std::to_string(cfg.buffer_capacity);
    out += ",\"reg_weight\":" + format_double(cfg.reg_weight);
    out += ",\"num_virtual_nodes\":" + std::to_string(cfg.num_virtual_nodes);
    out += ",\"seed\":" + std::to_string(cfg.seed);
    out += ",\"gram_probe_cap\":" + std::to_string(cfg.gram_probe_cap);
    out += '}';
    return out;
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.k = j.value("k", cfg.k);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.adam_eps = j.value("adam_eps", cfg.adam_eps);
    cfg.warmup_steps = j.value("warmup_steps", cfg.warmup_steps);
    cfg.total_steps = j.value("total_steps", cfg.total_steps);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.recalibration_period =
        j.value("recalibration_period", cfg.recalibration_period);
    cfg.buffer_capacity = j.value("buffer_capacity", cfg.buffer_capacity);
    cfg.reg_weight = j.value("reg_weight", cfg.reg_weight);
    cfg.num_virtual_nodes = j.value("num_virtual_nodes", cfg.num_virtual_nodes);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.gram_probe_cap = j.value("gram_probe_cap", cfg.gram_probe_cap);
    return cfg;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    const json doc = json::parse(read_file(path));
    ExperimentConfig cfg;
    if (doc.contains("world")) cfg.world = world_config_from_json(doc.at("world"));
    if (doc.contains("net")) cfg.net = net_config_from_json(doc.at("net"));
    if (doc.contains("train")) cfg.train = train_config_from_json(doc.at("train"));
    cfg.calib_samples = doc.value("calib_samples", cfg.calib_samples);
    return cfg;
}

void save_experiment_config(const std::string& path, const ExperimentConfig& cfg) {
    std::string out = "{\"world\":" + world_config_json(cfg.world);
    out += ",\"net\":" + net_config_json(cfg.net);
    out += ",\"train\":" + train_config_json(cfg.train);
    out += ",\"calib_samples\":" + std::to_string(cfg.calib_samples);
    out += "}\n";
    write_file(path, out);
}

namespace {

struct Bounds {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
};

Bounds series_bounds(const std::vector<SvgSeries>& series) {
    Bounds b;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                b = {x, x, y, y};
                first = false;
            }
            b.xmin = std::min(b.xmin, x);
            b.xmax = std::max(b.xmax, x);
            b.ymin = std::min(b.ymin, y);
            b.ymax = std::max(b.ymax, y);
        }
    }
    if (b.xmax == b.xmin) b.xmax = b.xmin + 1.0;
    if (b.ymax == b.ymin) b.ymax = b.ymin + 1.0;
    return b;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string svg_begin(const std::string& title) {
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n";
    out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           title + "</text>\n";
    return out;
}

}  // namespace

std::string svg_scatter(const std::vector<SvgSeries>& series,
                        const std::string& title) {
    const Bounds b = series_bounds(series);
    auto sx = [&](double x) { return 60.0 + 540.0 * (x - b.xmin) / (b.xmax - b.xmin); };
    auto sy = [&](double y) { return 440.0 - 390.0 * (y - b.ymin) / (b.ymax - b.ymin); };
    std::string out = svg_begin(title);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % 8];
        for (const auto& [x, y] : series[i].points) {
            out += "<circle cx=\"" + format_double(sx(x)) + "\" cy=\"" +
                   format_double(sy(y)) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
        }
        out += "<text x=\"70\" y=\"" + std::to_string(50 + 18 * i) +
               "\" font-size=\"12\" fill=\"" + color + "\">" + series[i].label +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string svg_lines(const std::vector<SvgSeries>& series,
                      const std::string& title) {
    const Bounds b = series_bounds(series);
    auto sx = [&](double x) { return 60.0 + 540.0 * (x - b.xmin) / (b.xmax - b.xmin); };
    auto sy = [&](double y) { return 440.0 - 390.0 * (y - b.ymin) / (b.ymax - b.ymin); };
    std::string out = svg_begin(title);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % 8];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[i].points) {
            out += format_double(sx(x)) + "," + format_double(sy(y)) + " ";
        }
        out += "\"/>\n";
        out += "<text x=\"70\" y=\"" + std::to_string(50 + 18 * i) +
               "\" font-size=\"12\" fill=\"" + color + "\">" + series[i].label +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace fenc::io
