#pragma once

#include <string>
#include <vector>

#include "cspace/data/table.hpp"
#include "cspace/impute/cami.hpp"
#include "cspace/predict/loo.hpp"
#include "cspace/predict/ngboost.hpp"

namespace cspace {

struct EvalOptions {
    std::vector<std::string> targets;  // empty: the last column
    CamiParams cami;
    NgbParams booster;
    int knn_k = 5;
    LooOptions loo;
};

struct EvalRow {
    std::string method;  // mean, zero, most-frequent, cami
    std::string model;   // booster, mean, knn
    std::vector<double> mape;  // percent, one per target
};

struct EvalReport {
    std::vector<std::string> targets;
    std::vector<EvalRow> rows;

    double mape(const std::string& method, const std::string& model, std::size_t target = 0) const;
};

/// Downstream prediction error after each imputation method. Targets are
/// never imputed; every method works on the rows and columns that survive
/// CAMI's thresholds so all methods see the same data.
EvalReport evaluate_imputers(const DataTable& data, const EvalOptions& options);

/// CSV with header method,model,<targets>.
std::string write_eval_csv(const EvalReport& report);

}  // namespace cspace
