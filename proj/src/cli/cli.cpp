#include "cspace/cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>

#include "cspace/cli/evaluate.hpp"
#include "cspace/core/error.hpp"
#include "cspace/data/csv.hpp"
#include "cspace/data/synth.hpp"
#include "cspace/embed/dbscan.hpp"
#include "cspace/impute/cami.hpp"
#include "cspace/layout/scene.hpp"
#include "cspace/service/config.hpp"
#include "cspace/service/service.hpp"

namespace cspace {

using nlohmann::json;

namespace {

struct Options {
    std::string input, output, config, svg, report;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> params, synth;
};

struct Local {
    int loo_repeats = 5;
    int loo_holdout = 3;
    int knn_k = 5;
};

ServiceConfig build_config(const Options& o, Local& local) {
    ServiceConfig cfg;
    if (!o.config.empty()) {
        cfg = load_config(o.config);
    } else if (const auto path = config_path(""); !path.empty()) {
        cfg = load_config(path);
    }
    if (o.seed) cfg.set("seed", std::to_string(*o.seed));
    for (const auto& p : o.params) {
        const auto [k, v] = split_assignment(p);
        if (k == "loo.repeats") local.loo_repeats = std::stoi(v);
        else if (k == "loo.holdout") local.loo_holdout = std::stoi(v);
        else if (k == "knn.k") local.knn_k = std::stoi(v);
        else cfg.set(k, v);
    }
    return cfg;
}

SynthSpec synth_spec(const Options& o) {
    SynthSpec s;
    if (o.seed) s.seed = *o.seed;
    for (const auto& item : o.synth) {
        const auto [k, v] = split_assignment(item);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) fail(ErrorKind::Spec, "synth " + k + " expects a number");
        if (k == "rows" || k == "n_rows") s.n_rows = static_cast<int>(x);
        else if (k == "cols" || k == "n_cols") s.n_cols = static_cast<int>(x);
        else if (k == "correlation") s.correlation = x;
        else if (k == "missing" || k == "missing_fraction") s.missing_fraction = x;
        else if (k == "mean") s.mean = x;
        else if (k == "sd") s.sd = x;
        else if (k == "seed") s.seed = static_cast<std::uint64_t>(x);
        else fail(ErrorKind::Spec, "unknown synth key '" + k + "'");
    }
    return s;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") out << text;
    else write_file(path, text);
}

json report_json(const ImputationReport& r) {
    json filled = json::array();
    for (const auto& f : r.filled) {
        filled.push_back({{"row", f.row}, {"column", f.column}, {"value", f.value}, {"neighbors", f.neighbors}});
    }
    return {{"dropped_columns", r.dropped_columns},
            {"dropped_rows", r.dropped_rows},
            {"filled", filled},
            {"column_neighbors", r.column_neighbors}};
}

int cmd_impute(const Options& o, std::ostream& out) {
    Local local;
    const auto cfg = build_config(o, local);
    if (o.input.empty()) fail(ErrorKind::Spec, "impute needs --input");
    const CsvOptions csv{cfg.missing_token};
    const auto res = cami_impute(load_csv(read_file(o.input), csv), cfg.cami);
    emit(o.output, write_csv(res.table, csv), out);
    std::string report = o.report;
    if (report.empty() && !o.output.empty() && o.output != "-") report = o.output + ".report.json";
    if (!report.empty()) write_file(report, report_json(res.report).dump(2) + "\n");
    return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    Local local;
    const auto cfg = build_config(o, local);
    DataTable data;
    if (!o.input.empty()) {
        data = load_csv(read_file(o.input), {cfg.missing_token});
    } else if (!o.synth.empty() || o.seed) {
        data = synth_generate(synth_spec(o)).masked;
    } else {
        fail(ErrorKind::Spec, "evaluate needs --input or --synth");
    }
    EvalOptions e;
    e.targets = cfg.targets;
    e.cami = cfg.cami;
    e.booster = cfg.booster;
    e.knn_k = local.knn_k;
    e.loo.repeats = local.loo_repeats;
    e.loo.holdout = local.loo_holdout;
    e.loo.seed = cfg.seed;
    emit(o.output, write_eval_csv(evaluate_imputers(data, e)), out);
    return kExitOk;
}

int cmd_layout(const Options& o, std::ostream& out) {
    Local local;
    const auto cfg = build_config(o, local);
    if (o.input.empty()) fail(ErrorKind::Spec, "layout needs --input");
    const auto emb = load_embedding_csv(read_file(o.input));
    const auto scene = run_layout(emb.points, emb.ids, std::nullopt, cfg.layout);
    emit(o.output, to_json(scene).dump(2) + "\n", out);
    if (!o.svg.empty()) write_file(o.svg, scene_svg(scene));
    return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
    if (o.output.empty() || o.output == "-") fail(ErrorKind::Spec, "synth needs --output PREFIX");
    const auto data = synth_generate(synth_spec(o));
    write_file(o.output + ".truth.csv", write_csv(data.truth));
    write_file(o.output + ".masked.csv", write_csv(data.masked));
    out << o.output << ".truth.csv\n" << o.output << ".masked.csv\n";
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
    Local local;
    const auto cfg = build_config(o, local);
    Service service(cfg);
    out << "listening on " << cfg.host << ':' << cfg.port << std::endl;
    if (!serve_http(service, cfg.host, cfg.port)) {
        err << "cannot listen on " << cfg.host << ':' << cfg.port << '\n';
        return kExitInternal;
    }
    return kExitOk;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Spec: return kExitUsage;
        case ErrorKind::Internal: return kExitInternal;
        default: return kExitData;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compound-space exploration engine"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "key=value config file (default: $CSPACE_CONFIG)");
        sub->add_option("--seed", o.seed, "seed for every module");
        sub->add_option("--params", o.params, "key=value override, repeatable")->take_all();
    };
    auto* impute = app.add_subcommand("impute", "fill missing cells with CAMI");
    impute->add_option("--input", o.input, "CSV to impute")->required();
    impute->add_option("--output", o.output, "imputed CSV (stdout when omitted)");
    impute->add_option("--report", o.report, "report JSON (default: OUTPUT.report.json)");
    common(impute);

    auto* evaluate = app.add_subcommand("evaluate", "MAPE after each imputation method and model");
    evaluate->add_option("--input", o.input, "masked CSV");
    evaluate->add_option("--synth", o.synth, "generate data instead, key=value (rows, cols, correlation, missing, mean, sd)")
        ->take_all();
    evaluate->add_option("--output", o.output, "result CSV (stdout when omitted)");
    common(evaluate);

    auto* layout = app.add_subcommand("layout", "lay out an embedding CSV (id,x,y)");
    layout->add_option("--input", o.input, "embedding CSV")->required();
    layout->add_option("--output", o.output, "scene JSON (stdout when omitted)");
    layout->add_option("--svg", o.svg, "also write an SVG rendering");
    common(layout);

    auto* serve = app.add_subcommand("serve", "start the HTTP service");
    common(serve);

    auto* synth = app.add_subcommand("synth", "write a synthetic truth/masked pair");
    synth->add_option("--synth", o.synth, "key=value (rows, cols, correlation, missing, mean, sd)")->take_all();
    synth->add_option("--output", o.output, "path prefix")->required();
    synth->add_option("--seed", o.seed, "generator seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (impute->parsed()) return cmd_impute(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (layout->parsed()) return cmd_layout(o, out);
        if (synth->parsed()) return cmd_synth(o, out);
        if (serve->parsed()) return cmd_serve(o, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::invalid_argument& e) {
        err << "error: bad number in parameters\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace cspace
