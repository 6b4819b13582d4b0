#include "cspace/cli/evaluate.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "cspace/core/error.hpp"
#include "cspace/data/csv.hpp"

namespace cspace {

double EvalReport::mape(const std::string& method, const std::string& model, std::size_t target) const {
    for (const auto& r : rows) {
        if (r.method == method && r.model == model) return r.mape.at(target);
    }
    fail(ErrorKind::Key, "no evaluation row " + method + "/" + model);
}

EvalReport evaluate_imputers(const DataTable& data, const EvalOptions& options) {
    EvalReport report;
    report.targets = options.targets;
    if (data.empty()) fail(ErrorKind::EmptyInput, "nothing to evaluate");
    if (report.targets.empty()) report.targets.push_back(data.column(data.cols() - 1).name);

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        const auto& name = data.column(c).name;
        if (std::find(report.targets.begin(), report.targets.end(), name) == report.targets.end()) {
            feature_cols.push_back(c);
        }
    }
    for (const auto& t : report.targets) (void)data.column_index(t);
    if (feature_cols.empty()) fail(ErrorKind::Input, "no feature columns besides the targets");

    const DataTable features = data.select_columns(feature_cols);
    const auto cami = cami_impute(features, options.cami);
    std::vector<std::size_t> rows, cols;
    for (const auto& id : cami.table.row_ids()) rows.push_back(features.row_index(id));
    for (const auto& c : cami.table.columns()) cols.push_back(features.column_index(c.name));
    const DataTable base = features.select_rows(rows).select_columns(cols);
    const DataTable targets = data.select_rows(rows);

    const NgbParams booster = options.booster;
    const int k = options.knn_k;
    const std::vector<ModelSpec> models = {
        {"booster", [booster] { return std::make_unique<BoosterPredictor>(booster); }},
        {"mean", [] { return std::make_unique<MeanPredictor>(); }},
        {"knn", [k] { return std::make_unique<KnnPredictor>(k); }},
    };

    const std::vector<std::pair<std::string, DataTable>> imputed = {
        {"mean", baseline_impute(base, BaselineMethod::Mean)},
        {"zero", baseline_impute(base, BaselineMethod::Zero)},
        {"most-frequent", baseline_impute(base, BaselineMethod::MostFrequent)},
        {"cami", cami.table},
    };
    for (const auto& [method, table] : imputed) {
        std::vector<EvalRow> block;
        for (const auto& m : models) block.push_back({method, m.name, {}});
        for (const auto& t : report.targets) {
            auto columns = table.columns();
            columns.push_back(targets.column(t));
            const DataTable one(table.row_ids(), std::move(columns));
            const auto res = loo_evaluate(one, t, models, options.loo);
            for (std::size_t i = 0; i < res.size(); ++i) block[i].mape.push_back(res[i].mape);
        }
        report.rows.insert(report.rows.end(), block.begin(), block.end());
    }
    return report;
}

std::string write_eval_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "method,model";
    for (const auto& t : report.targets) out << ',' << t;
    out << '\n';
    for (const auto& r : report.rows) {
        out << r.method << ',' << r.model;
        for (double v : r.mape) out << ',' << format_double(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace cspace
