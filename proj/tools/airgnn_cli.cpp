// Command-line harness: dataset generation, training, evaluation and the
// experiment sweeps, emitting CSV for external plotting.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airgnn/checkpoint.hpp"
#include "airgnn/config.hpp"

namespace fs = std::filesystem;
using namespace airgnn;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const std::string& path, const std::string& header) : out(path) {
        if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
        out << "# schema airgnn-exp-1\n" << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    }
};

// ---------------------------------------------------------------------------
// gen-data

struct GenArgs {
    std::string config_path, out_path;
    int pairs = -1, layouts = -1, frames = -1;
    double field_len = -1.0, min_dist = -1.0, max_dist = -1.0, rho = -1.0;
    std::string rho_mode;
    int64_t seed = -1;
};

int cmd_gen_data(const GenArgs& a) {
    config::RunConfig cfg =
        a.config_path.empty() ? config::RunConfig{} : config::parse_config(a.config_path);
    netgen::DatasetConfig& d = cfg.data;
    if (a.pairs >= 0) d.K = a.pairs;
    if (a.layouts >= 0) d.layouts = a.layouts;
    if (a.frames >= 0) d.T = a.frames;
    if (a.field_len >= 0.0) d.field_len = a.field_len;
    if (a.min_dist >= 0.0) d.min_dist = a.min_dist;
    if (a.max_dist >= 0.0) d.max_dist = a.max_dist;
    if (!a.rho_mode.empty()) {
        if (a.rho_mode == "uniform") d.rho_mode = netgen::RhoMode::uniform;
        else if (a.rho_mode == "fixed") d.rho_mode = netgen::RhoMode::fixed;
        else throw std::runtime_error("rho-mode must be 'uniform' or 'fixed'");
    }
    if (a.rho >= 0.0) d.rho_fixed = a.rho;
    if (a.seed >= 0) d.seed = static_cast<uint64_t>(a.seed);

    const netgen::Dataset ds = netgen::generate_dataset(d);
    ds.save(a.out_path);
    std::cout << "wrote " << a.out_path << ": " << ds.episodes.size() << " layouts, K=" << d.K
              << ", T=" << d.T << ", field " << d.field_len << " m\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string config_path, data_path, kind, out_path, curve_path;
    int iterations = -1, batch_size = -1, decay_interval = -1, curve_interval = -1, threads = -1;
    double lr = -1.0, lr_decay = -1.0, val_fraction = -1.0;
    int64_t seed = -1;
};

void write_curve(const std::string& path, const std::string& kind,
                 const std::vector<train::CurvePoint>& curve, uint64_t seed) {
    CsvWriter csv(path, "kind,iteration,val_sum_rate,lr,seed");
    for (const auto& p : curve)
        csv.row({kind, std::to_string(p.iteration), fmt(p.val_sum_rate), fmt(p.lr),
                 std::to_string(seed)});
}

int cmd_train(const TrainArgs& a) {
    config::RunConfig cfg =
        a.config_path.empty() ? config::RunConfig{} : config::parse_config(a.config_path);
    train::TrainConfig& t = cfg.train;
    if (a.iterations >= 0) t.iterations = a.iterations;
    if (a.batch_size >= 0) t.batch_size = a.batch_size;
    if (a.decay_interval >= 0) t.decay_interval = a.decay_interval;
    if (a.curve_interval >= 0) t.curve_interval = a.curve_interval;
    if (a.threads >= 0) t.threads = a.threads;
    if (a.lr >= 0.0) t.initial_lr = a.lr;
    if (a.lr_decay >= 0.0) t.lr_decay = a.lr_decay;
    if (a.val_fraction >= 0.0) t.val_fraction = a.val_fraction;
    if (a.seed >= 0) t.seed = static_cast<uint64_t>(a.seed);
    const gnn::PolicyKind kind =
        a.kind.empty() ? cfg.kind : gnn::policy_kind_from_name(a.kind);

    const netgen::Dataset ds = netgen::Dataset::load(a.data_path);
    const train::TrainResult r = train::train(kind, ds, t);
    checkpoint::save(r.model, a.out_path);
    if (!a.curve_path.empty()) write_curve(a.curve_path, gnn::policy_kind_name(kind), r.curve, t.seed);
    std::cout << "trained " << gnn::policy_kind_name(kind) << " (" << r.model.param_count()
              << " parameters) in " << fmt(r.seconds) << " s";
    if (!r.curve.empty())
        std::cout << "; final validation sum-rate " << fmt(r.curve.back().val_sum_rate)
                  << " bps/Hz";
    std::cout << "\nwrote " << a.out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string config_path, data_path, ckpt_path, scheme, csv_path, mode = "ideal";
    int delta_csi = -1, delta_mp = -1, ns = -1, threads = -1;
    bool no_overhead = false, bias_correction = false, pilot_noise = false;
    int64_t seed = -1;
};

int cmd_eval(const EvalArgs& a) {
    config::RunConfig cfg =
        a.config_path.empty() ? config::RunConfig{} : config::parse_config(a.config_path);
    const netgen::Dataset ds = netgen::Dataset::load(a.data_path);

    train::EvalOptions opts;
    opts.overhead = cfg.overhead;
    if (a.delta_csi >= 0) opts.overhead.delta_csi = a.delta_csi;
    if (a.delta_mp >= 0) opts.overhead.delta_mp = a.delta_mp;
    if (a.ns >= 0) opts.overhead.ns = a.ns;
    if (a.threads >= 0) opts.threads = a.threads;
    if (a.seed >= 0) opts.seed = static_cast<uint64_t>(a.seed);
    opts.apply_overhead = !a.no_overhead;
    opts.mode = a.mode == "physical" ? gnn::AirOptions::Mode::physical : gnn::AirOptions::Mode::ideal;
    opts.noise_bias_correction = a.bias_correction;
    if (a.pilot_noise) opts.pilot_sigma2_mw = ds.config.channel.noise_mw();

    std::string scheme_name;
    long n_o = 0;
    train::EvalResult r;
    if (!a.ckpt_path.empty()) {
        const gnn::PolicyModel model = checkpoint::load(a.ckpt_path);
        opts.overhead.layers = model.layers;
        scheme_name = gnn::policy_kind_name(model.kind);
        n_o = evalmetrics::overhead_symbols(evalmetrics::scheme_from_name(scheme_name),
                                            ds.config.K, opts.overhead);
        r = train::evaluate_policy(model, ds, opts);
    } else {
        const evalmetrics::Scheme s = evalmetrics::scheme_from_name(a.scheme);
        scheme_name = a.scheme;
        n_o = evalmetrics::overhead_symbols(s, ds.config.K, opts.overhead);
        r = train::evaluate_baseline(s, ds, opts);
    }
    const double ratio = static_cast<double>(n_o) / opts.overhead.ns;
    std::cout << scheme_name << ": mean sum-rate " << fmt(r.mean_sum_rate) << " bps/Hz over "
              << r.per_layout.size() << " layouts (overhead ratio " << fmt(100.0 * ratio)
              << "%" << (opts.apply_overhead ? "" : ", not applied") << ")\n";
    if (!a.csv_path.empty()) {
        CsvWriter csv(a.csv_path, "scheme,layout,sum_rate");
        for (size_t i = 0; i < r.per_layout.size(); ++i)
            csv.row({scheme_name, std::to_string(i), fmt(r.per_layout[i])});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// inspect-checkpoint

int cmd_inspect(const std::string& path) {
    const gnn::PolicyModel m = checkpoint::load(path);
    auto dims = [](const diffmath::MlpParams& p) {
        std::string s = "{";
        for (size_t i = 0; i < p.dims.size(); ++i)
            s += (i ? "," : "") + std::to_string(p.dims[i]);
        return s + "}";
    };
    std::cout << "kind: " << gnn::policy_kind_name(m.kind) << "\n"
              << "layers: " << m.layers << "\n"
              << "embedding dim: " << m.embed_dim << "\n"
              << "parameters: " << m.param_count() << "\n"
              << "message MLP: " << dims(m.message) << "\n"
              << "update MLP: " << dims(m.update) << "\n"
              << "output MLP: " << dims(m.output) << " (sigmoid)\n"
              << "direct-gain stats: mean " << fmt(m.stats.direct_mean) << ", std "
              << fmt(m.stats.direct_std) << "\n"
              << "interference-gain stats: mean " << fmt(m.stats.interf_mean) << ", std "
              << fmt(m.stats.interf_std) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// experiment

struct ExpArgs {
    std::string id, outdir, workdir;
    int64_t seed = 1;
    int threads = 0;
    int train_layouts = 500, test_layouts = 200, iterations = 2000;
    bool reuse_only = false;  // fail instead of training on demand
};

struct ExpContext {
    ExpArgs args;
    netgen::DatasetConfig base;  // K=20 reference settings

    std::string ds_path(const netgen::DatasetConfig& d, const std::string& tag) const {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "ds-%s-K%d-T%d-L%d-f%g-s%llu.bin", tag.c_str(), d.K, d.T,
                      d.layouts, d.field_len, static_cast<unsigned long long>(d.seed));
        return (fs::path(args.workdir) / buf).string();
    }

    netgen::Dataset ensure_dataset(const netgen::DatasetConfig& d, const std::string& tag) const {
        const std::string path = ds_path(d, tag);
        if (fs::exists(path)) return netgen::Dataset::load(path);
        netgen::Dataset ds = netgen::generate_dataset(d);
        ds.save(path);
        return ds;
    }

    gnn::PolicyModel ensure_checkpoint(gnn::PolicyKind kind, const netgen::Dataset& train_ds) {
        const std::string name = "ckpt-" + gnn::policy_kind_name(kind) + "-i" +
                                 std::to_string(args.iterations) + "-s" +
                                 std::to_string(args.seed) + ".bin";
        const std::string path = (fs::path(args.workdir) / name).string();
        if (fs::exists(path)) return checkpoint::load(path);
        if (args.reuse_only)
            throw std::runtime_error(
                "missing checkpoint '" + path + "'; train it with: airgnn train --data " +
                ds_path(train_ds.config, "train") + " --kind " + gnn::policy_kind_name(kind) +
                " --iterations " + std::to_string(args.iterations) + " --seed " +
                std::to_string(args.seed) + " --out " + path);
        train::TrainConfig t;
        t.iterations = args.iterations;
        t.seed = static_cast<uint64_t>(args.seed);
        t.threads = args.threads;
        std::cout << "training " << gnn::policy_kind_name(kind) << " (" << t.iterations
                  << " iterations)...\n";
        const train::TrainResult r = train::train(kind, train_ds, t);
        checkpoint::save(r.model, path);
        std::cout << "  done in " << fmt(r.seconds) << " s\n";
        return r.model;
    }
};

const std::vector<evalmetrics::Scheme> kAllSchemes = {
    evalmetrics::Scheme::epa,      evalmetrics::Scheme::wmmse,    evalmetrics::Scheme::air_wmmse,
    evalmetrics::Scheme::mpnn,     evalmetrics::Scheme::air_mpnn, evalmetrics::Scheme::air_mprnn,
};

bool is_policy(evalmetrics::Scheme s) {
    return s == evalmetrics::Scheme::mpnn || s == evalmetrics::Scheme::air_mpnn ||
           s == evalmetrics::Scheme::air_mprnn;
}

gnn::PolicyKind kind_of(evalmetrics::Scheme s) {
    switch (s) {
        case evalmetrics::Scheme::mpnn: return gnn::PolicyKind::mpnn;
        case evalmetrics::Scheme::air_mpnn: return gnn::PolicyKind::air_mpnn;
        default: return gnn::PolicyKind::air_mprnn;
    }
}

double eval_scheme(evalmetrics::Scheme s, const std::map<gnn::PolicyKind, gnn::PolicyModel>& models,
                   const netgen::Dataset& test, train::EvalOptions opts) {
    if (is_policy(s)) {
        const gnn::PolicyModel& m = models.at(kind_of(s));
        opts.overhead.layers = m.layers;
        return train::evaluate_policy(m, test, opts).mean_sum_rate;
    }
    return train::evaluate_baseline(s, test, opts).mean_sum_rate;
}

const char* kExpHeader = "experiment,scheme,K,delta_csi,delta_mp,ns,rho_or_gamma,"
                         "mean_sum_rate,overhead_ratio,seed";

void exp_row(CsvWriter& csv, const std::string& exp, const std::string& scheme, int K,
             const evalmetrics::OverheadConfig& o, const std::string& rho_or_gamma, double rate,
             double ratio, int64_t seed) {
    csv.row({exp, scheme, std::to_string(K), std::to_string(o.delta_csi),
             std::to_string(o.delta_mp), std::to_string(o.ns), rho_or_gamma, fmt(rate),
             fmt(ratio), std::to_string(seed)});
}

double ratio_of(evalmetrics::Scheme s, int K, evalmetrics::OverheadConfig o,
                const std::map<gnn::PolicyKind, gnn::PolicyModel>& models) {
    if (is_policy(s)) o.layers = models.at(kind_of(s)).layers;
    return static_cast<double>(evalmetrics::overhead_symbols(s, K, o)) / o.ns;
}

int cmd_experiment(const ExpArgs& a) {
    ExpContext ctx{a, {}};
    ctx.base.layouts = a.train_layouts;
    ctx.base.seed = static_cast<uint64_t>(a.seed);
    fs::create_directories(a.outdir);
    fs::create_directories(a.workdir);

    const netgen::Dataset train_ds = ctx.ensure_dataset(ctx.base, "train");
    std::map<gnn::PolicyKind, gnn::PolicyModel> models;

    auto need_models = [&](std::initializer_list<gnn::PolicyKind> kinds) {
        for (gnn::PolicyKind k : kinds)
            if (!models.count(k)) models.emplace(k, ctx.ensure_checkpoint(k, train_ds));
    };
    auto test_config = [&](int K, double field_len) {
        netgen::DatasetConfig d = ctx.base;
        d.K = K;
        d.field_len = field_len;
        d.layouts = a.test_layouts;
        d.seed = ctx.base.seed + 0x7E57;  // disjoint from the training seed
        return d;
    };
    train::EvalOptions opts;
    opts.threads = a.threads;
    opts.seed = static_cast<uint64_t>(a.seed);
    const std::string out = (fs::path(a.outdir) / (a.id + ".csv")).string();

    if (a.id == "table3") {
        need_models({gnn::PolicyKind::mpnn, gnn::PolicyKind::air_mpnn, gnn::PolicyKind::air_mprnn});
        const netgen::Dataset test = ctx.ensure_dataset(test_config(20, 500.0), "test");
        CsvWriter csv(out, kExpHeader);
        for (auto s : kAllSchemes) {
            const double rate = eval_scheme(s, models, test, opts);
            exp_row(csv, a.id, evalmetrics::scheme_name(s), 20, opts.overhead, "",
                    rate, ratio_of(s, 20, opts.overhead, models), a.seed);
        }
    } else if (a.id == "fig5-curve") {
        CsvWriter csv(out, "experiment,kind,iteration,val_sum_rate,lr,seed");
        for (gnn::PolicyKind k :
             {gnn::PolicyKind::mpnn, gnn::PolicyKind::air_mpnn, gnn::PolicyKind::air_mprnn}) {
            train::TrainConfig t;
            t.iterations = a.iterations;
            t.seed = static_cast<uint64_t>(a.seed);
            t.threads = a.threads;
            std::cout << "training " << gnn::policy_kind_name(k) << " for the curve...\n";
            const train::TrainResult r = train::train(k, train_ds, t);
            for (const auto& p : r.curve)
                csv.row({a.id, gnn::policy_kind_name(k), std::to_string(p.iteration),
                         fmt(p.val_sum_rate), fmt(p.lr), std::to_string(a.seed)});
        }
    } else if (a.id == "fig6-size-sweep" || a.id == "fig7-overhead-sweep") {
        need_models({gnn::PolicyKind::mpnn, gnn::PolicyKind::air_mpnn, gnn::PolicyKind::air_mprnn});
        std::vector<std::pair<int, int>> deltas;
        std::vector<int> sizes;
        if (a.id == "fig6-size-sweep") {
            deltas = {{0, 0}, {1, 5}, {2, 20}};
            sizes = {10, 20, 30, 40, 50};
        } else {
            deltas = {{0, 0}, {1, 5}, {2, 10}, {2, 20}, {4, 20}, {8, 40}};
            sizes = {20};
        }
        CsvWriter csv(out, kExpHeader);
        for (int K : sizes) {
            const netgen::Dataset test = ctx.ensure_dataset(test_config(K, 500.0), "test");
            for (auto [dc, dm] : deltas) {
                train::EvalOptions o = opts;
                o.overhead.delta_csi = dc;
                o.overhead.delta_mp = dm;
                for (auto s : kAllSchemes)
                    exp_row(csv, a.id, evalmetrics::scheme_name(s), K, o.overhead, "",
                            eval_scheme(s, models, test, o),
                            ratio_of(s, K, o.overhead, models), a.seed);
            }
        }
    } else if (a.id == "fig8-framelen-sweep") {
        need_models({gnn::PolicyKind::mpnn, gnn::PolicyKind::air_mpnn, gnn::PolicyKind::air_mprnn});
        const netgen::Dataset test = ctx.ensure_dataset(test_config(30, 500.0), "test");
        CsvWriter csv(out, kExpHeader);
        for (int ns : {200, 500, 1000, 2000, 3000, 4000, 5000, 6000}) {
            train::EvalOptions o = opts;
            o.overhead.ns = ns;
            for (auto s : kAllSchemes)
                exp_row(csv, a.id, evalmetrics::scheme_name(s), 30, o.overhead, "",
                        eval_scheme(s, models, test, o), ratio_of(s, 30, o.overhead, models),
                        a.seed);
        }
    } else if (a.id == "table4-rho-sweep") {
        need_models({gnn::PolicyKind::air_mpnn, gnn::PolicyKind::air_mprnn});
        CsvWriter csv(out, kExpHeader);
        for (double rho : {0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99}) {
            netgen::DatasetConfig d = test_config(30, 500.0);
            d.rho_mode = netgen::RhoMode::fixed;
            d.rho_fixed = rho;
            char tag[32];
            std::snprintf(tag, sizeof(tag), "rho%.2f", rho);
            const netgen::Dataset test = ctx.ensure_dataset(d, tag);
            const double mpnn_rate =
                eval_scheme(evalmetrics::Scheme::air_mpnn, models, test, opts);
            const double mprnn_rate =
                eval_scheme(evalmetrics::Scheme::air_mprnn, models, test, opts);
            exp_row(csv, a.id, "air-mpnn", 30, opts.overhead, fmt(rho), mpnn_rate,
                    ratio_of(evalmetrics::Scheme::air_mpnn, 30, opts.overhead, models), a.seed);
            exp_row(csv, a.id, "air-mprnn", 30, opts.overhead, fmt(rho), mprnn_rate,
                    ratio_of(evalmetrics::Scheme::air_mprnn, 30, opts.overhead, models), a.seed);
            exp_row(csv, a.id, "air-mprnn/air-mpnn", 30, opts.overhead, fmt(rho),
                    mprnn_rate / mpnn_rate, 0.0, a.seed);
        }
    } else if (a.id == "fig9-density-sweep") {
        need_models({gnn::PolicyKind::mpnn, gnn::PolicyKind::air_mpnn, gnn::PolicyKind::air_mprnn});
        CsvWriter csv(out, kExpHeader);
        for (double gamma : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            // density factor = train density / test density; realized by
            // scaling the test field edge by sqrt(gamma) at fixed K
            const double field = ctx.base.field_len * std::sqrt(gamma);
            char tag[32];
            std::snprintf(tag, sizeof(tag), "g%.3g", gamma);
            const netgen::Dataset test = ctx.ensure_dataset(test_config(20, field), tag);
            for (auto s : kAllSchemes)
                exp_row(csv, a.id, evalmetrics::scheme_name(s), 20, opts.overhead, fmt(gamma),
                        eval_scheme(s, models, test, opts),
                        ratio_of(s, 20, opts.overhead, models), a.seed);
        }
    } else {
        throw CLI::ValidationError("--id", "unknown experiment '" + a.id + "'");
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D2D power-allocation simulator: GNN policies with over-the-air aggregation"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* sc_gen = app.add_subcommand("gen-data", "Generate a channel dataset file");
    sc_gen->add_option("--config", gen.config_path, "Config file (INI sections)");
    sc_gen->add_option("--out", gen.out_path, "Output dataset path")->required();
    sc_gen->add_option("--pairs", gen.pairs, "Number of D2D pairs K");
    sc_gen->add_option("--layouts", gen.layouts, "Number of layouts");
    sc_gen->add_option("--frames", gen.frames, "Frames per episode T");
    sc_gen->add_option("--field-len", gen.field_len, "Square field edge [m]");
    sc_gen->add_option("--min-dist", gen.min_dist, "Min pair distance [m]");
    sc_gen->add_option("--max-dist", gen.max_dist, "Max pair distance [m]");
    sc_gen->add_option("--rho-mode", gen.rho_mode, "uniform | fixed");
    sc_gen->add_option("--rho", gen.rho, "Fixed correlation coefficient");
    sc_gen->add_option("--seed", gen.seed, "Master seed");

    TrainArgs tr;
    auto* sc_tr = app.add_subcommand("train", "Train a policy on a dataset");
    sc_tr->add_option("--config", tr.config_path, "Config file");
    sc_tr->add_option("--data", tr.data_path, "Training dataset")->required();
    sc_tr->add_option("--kind", tr.kind, "mpnn | air-mpnn | air-mprnn");
    sc_tr->add_option("--out", tr.out_path, "Checkpoint output path")->required();
    sc_tr->add_option("--curve", tr.curve_path, "Learning-curve CSV path");
    sc_tr->add_option("--iterations", tr.iterations, "Training iterations");
    sc_tr->add_option("--batch-size", tr.batch_size, "Batch size");
    sc_tr->add_option("--lr", tr.lr, "Initial learning rate");
    sc_tr->add_option("--lr-decay", tr.lr_decay, "Decay factor");
    sc_tr->add_option("--decay-interval", tr.decay_interval, "Iterations between decays");
    sc_tr->add_option("--val-fraction", tr.val_fraction, "Validation holdout fraction");
    sc_tr->add_option("--curve-interval", tr.curve_interval, "Curve sampling interval");
    sc_tr->add_option("--threads", tr.threads, "Worker threads (0 = all cores)");
    sc_tr->add_option("--seed", tr.seed, "Training seed");

    EvalArgs ev;
    auto* sc_ev = app.add_subcommand("eval", "Evaluate a checkpoint or baseline");
    sc_ev->add_option("--config", ev.config_path, "Config file");
    sc_ev->add_option("--data", ev.data_path, "Test dataset")->required();
    auto* o_ck = sc_ev->add_option("--checkpoint", ev.ckpt_path, "Trained policy checkpoint");
    sc_ev->add_option("--scheme", ev.scheme, "epa | wmmse | air-wmmse")->excludes(o_ck);
    sc_ev->add_option("--csv", ev.csv_path, "Per-layout CSV output");
    sc_ev->add_option("--delta-csi", ev.delta_csi, "Symbols per CSI estimation");
    sc_ev->add_option("--delta-mp", ev.delta_mp, "Symbols per embedding broadcast");
    sc_ev->add_option("--frame-symbols", ev.ns, "Symbols per frame N_S");
    sc_ev->add_flag("--no-overhead", ev.no_overhead, "Skip the overhead prefactor");
    sc_ev->add_option("--mode", ev.mode, "ideal | physical pilot aggregation");
    sc_ev->add_flag("--pilot-noise", ev.pilot_noise, "Thermal noise on physical pilots");
    sc_ev->add_flag("--bias-correction", ev.bias_correction, "Subtract pilot noise bias");
    sc_ev->add_option("--threads", ev.threads, "Worker threads");
    sc_ev->add_option("--seed", ev.seed, "Evaluation noise seed");

    ExpArgs ex;
    auto* sc_ex = app.add_subcommand("experiment", "Run a named experiment sweep");
    sc_ex->add_option("--id", ex.id,
                      "table3 | fig5-curve | fig6-size-sweep | fig7-overhead-sweep | "
                      "fig8-framelen-sweep | table4-rho-sweep | fig9-density-sweep")
        ->required();
    sc_ex->add_option("--outdir", ex.outdir, "CSV output directory")->required();
    sc_ex->add_option("--workdir", ex.workdir, "Dataset/checkpoint cache directory");
    sc_ex->add_option("--seed", ex.seed, "Master seed");
    sc_ex->add_option("--threads", ex.threads, "Worker threads");
    sc_ex->add_option("--train-layouts", ex.train_layouts, "Training layouts");
    sc_ex->add_option("--test-layouts", ex.test_layouts, "Test layouts per grid point");
    sc_ex->add_option("--iterations", ex.iterations, "Training iterations");
    sc_ex->add_flag("--reuse-only", ex.reuse_only, "Fail if a checkpoint is missing");

    std::string inspect_path;
    auto* sc_in = app.add_subcommand("inspect-checkpoint", "Describe a checkpoint file");
    sc_in->add_option("path", inspect_path, "Checkpoint file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_gen->parsed()) return cmd_gen_data(gen);
        if (sc_tr->parsed()) return cmd_train(tr);
        if (sc_ev->parsed()) {
            if (ev.ckpt_path.empty() == ev.scheme.empty()) {
                std::cerr << "eval: exactly one of --checkpoint or --scheme is required\n";
                return 1;
            }
            return cmd_eval(ev);
        }
        if (sc_ex->parsed()) {
            if (ex.workdir.empty()) ex.workdir = ex.outdir;
            return cmd_experiment(ex);
        }
        if (sc_in->parsed()) return cmd_inspect(inspect_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
