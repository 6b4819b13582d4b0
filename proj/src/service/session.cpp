#include "cspace/service/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cspace/embed/tsne.hpp"
#include "cspace/impute/cami.hpp"
#include "cspace/impute/correlation.hpp"
#include "cspace/layout/scene.hpp"
#include "cspace/service/formula.hpp"

namespace cspace {

using nlohmann::json;

namespace {

template <class Fn>
void stage(const char* name, Fn&& fn) {
    try {
        fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(name, e.kind(), e.what());
    }
}

// Column indices with columns of one group kept together, groups in order of
// first appearance.
std::vector<std::size_t> grouped_columns(const DataTable& t) {
    std::vector<std::string> order;
    for (const auto& c : t.columns()) {
        const auto g = attribute_group(c);
        if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    }
    std::vector<std::size_t> out;
    for (const auto& g : order) {
        for (std::size_t c = 0; c < t.cols(); ++c) {
            if (attribute_group(t.column(c)) == g) out.push_back(c);
        }
    }
    return out;
}

std::string kind_name(AttrKind k) { return k == AttrKind::Target ? "target" : "observed"; }

}  // namespace

double radius_scalar(std::optional<double> rsd_percent) {
    if (!rsd_percent) return 0.1;
    return std::clamp(1.0 - std::min(*rsd_percent / 100.0, 1.0), 0.1, 1.0);
}

Session::Session(std::string id, const DataTable& raw, ServiceConfig config)
    : id_(std::move(id)), config_(std::move(config)), tree_(std::vector<std::string>{}) {
    std::vector<std::size_t> feature_cols, target_cols;
    stage("load", [&] {
        if (raw.empty()) fail(ErrorKind::EmptyInput, "dataset has no rows or no columns");
        if (raw.rows() > config_.max_rows) {
            fail(ErrorKind::Input, "dataset has " + std::to_string(raw.rows()) + " rows, the limit is " +
                                       std::to_string(config_.max_rows));
        }
        std::set<std::string> targets(config_.targets.begin(), config_.targets.end());
        for (const auto& t : config_.targets) (void)raw.column_index(t);
        for (const auto& [name, m] : raw.meta()) {
            if (m.kind == AttrKind::Target && raw.find_column(name)) targets.insert(name);
        }
        for (std::size_t c = 0; c < raw.cols(); ++c) {
            if (targets.count(raw.column(c).name)) {
                target_cols.push_back(c);
                targets_.push_back(raw.column(c).name);
            } else {
                feature_cols.push_back(c);
            }
        }
        if (feature_cols.empty()) fail(ErrorKind::Input, "no feature columns besides the targets");
    });

    CamiResult cami;
    try {
        cami = cami_impute(raw.select_columns(feature_cols), config_.cami);
    } catch (const Error& e) {
        throw PipelineError(e.kind() == ErrorKind::EmptyResult ? "threshold_filter" : "impute", e.kind(), e.what());
    }
    report_ = cami.report;

    // Working table: imputed features then targets, on the surviving rows.
    std::vector<std::size_t> kept_rows;
    for (const auto& r : cami.table.row_ids()) kept_rows.push_back(raw.row_index(r));
    std::vector<std::size_t> prefill_cols;
    for (const auto& c : cami.table.columns()) prefill_cols.push_back(raw.column_index(c.name));
    prefill_cols.insert(prefill_cols.end(), target_cols.begin(), target_cols.end());
    const DataTable prefill = raw.select_rows(kept_rows).select_columns(prefill_cols);
    provenance_ = CellProvenance::from_table(prefill);
    const std::size_t nf = cami.table.cols();
    const std::size_t n = prefill.rows();

    std::vector<Column> columns = cami.table.columns();
    std::map<std::string, AttrMeta> meta;
    for (const auto& [name, m] : raw.meta()) {
        if (prefill.find_column(name)) meta[name] = m;
    }
    for (std::size_t c = 0; c < nf; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            if (prefill.missing(r, c)) provenance_.mark(r, c, Provenance::Imputed);
        }
    }

    std::vector<std::size_t> fidx(nf);
    for (std::size_t c = 0; c < nf; ++c) fidx[c] = c;
    const Matrix x(n, nf, cami.table.dense(fidx));

    stage("predict", [&] {
        for (std::size_t t = 0; t < targets_.size(); ++t) {
            const auto& name = targets_[t];
            const std::size_t col = nf + t;
            std::vector<std::size_t> train;
            std::vector<double> y;
            for (std::size_t r = 0; r < n; ++r) {
                if (!prefill.missing(r, col)) {
                    train.push_back(r);
                    y.push_back(*prefill.at(r, col));
                }
            }
            TargetModel tm;
            tm.target = name;
            tm.model = fit_ngb(x.select_rows(train), y, config_.booster);
            Column out = prefill.column(col);
            for (std::size_t r = 0; r < n; ++r) {
                if (out.values[r]) continue;
                const auto p = predict_ngb(tm.model, x.row(r));
                out.values[r] = p.mu;
                provenance_.mark(r, col, Provenance::Predicted);
                if (p.rsd_percent) uncertainty_[name][prefill.row_ids()[r]] = *p.rsd_percent;
            }
            columns.push_back(std::move(out));
            meta[name].kind = AttrKind::Target;
            models_[name] = std::move(tm);
        }
    });
    table_ = DataTable(prefill.row_ids(), std::move(columns), std::move(meta));
    normalized_ = normalize_minmax(table_);

    stage("explain", [&] {
        if (config_.shap_features < 1 || static_cast<std::size_t>(config_.shap_features) > kMaxShapFeatures) {
            fail(ErrorKind::TooManyFeatures, "shap.max_features must be in 1..12");
        }
        const auto cm = pairwise_pearson(table_);
        for (auto& [name, tm] : models_) {
            std::vector<std::string> chosen;
            if (nf <= static_cast<std::size_t>(config_.shap_features)) {
                for (std::size_t c = 0; c < nf; ++c) chosen.push_back(table_.column(c).name);
            } else {
                std::vector<std::string> ranked;
                for (const auto& a : top_correlated(cm, name, static_cast<int>(table_.cols()))) {
                    if (table_.column_index(a) < nf) ranked.push_back(a);
                }
                for (std::size_t c = 0; ranked.size() < static_cast<std::size_t>(config_.shap_features) && c < nf; ++c) {
                    if (std::find(ranked.begin(), ranked.end(), table_.column(c).name) == ranked.end()) {
                        ranked.push_back(table_.column(c).name);
                    }
                }
                ranked.resize(static_cast<std::size_t>(config_.shap_features));
                for (std::size_t c = 0; c < nf; ++c) {
                    if (std::find(ranked.begin(), ranked.end(), table_.column(c).name) != ranked.end()) {
                        chosen.push_back(table_.column(c).name);
                    }
                }
            }
            std::vector<std::size_t> sel;
            for (const auto& a : chosen) sel.push_back(table_.column_index(a));

            // Background: feature means over the rows the model was trained on.
            const auto& target_col = prefill.column(table_.column_index(name));
            std::vector<double> bg(sel.size(), 0.0);
            int nt = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (!target_col.values[r]) continue;
                ++nt;
                for (std::size_t j = 0; j < sel.size(); ++j) bg[j] += x(r, sel[j]);
            }
            for (auto& b : bg) b /= nt;

            tm.shap_features = chosen;
            tm.phi = Matrix(n, sel.size());
            Matrix values(n, sel.size());
            std::vector<double> xs(sel.size()), buf(nf);
            for (std::size_t r = 0; r < n; ++r) {
                const auto row = x.row(r);
                for (std::size_t j = 0; j < sel.size(); ++j) xs[j] = values(r, j) = row[sel[j]];
                const ModelFn f = [&](std::span<const double> z) {
                    std::copy(row.begin(), row.end(), buf.begin());
                    for (std::size_t j = 0; j < sel.size(); ++j) buf[sel[j]] = z[j];
                    return predict_ngb(tm.model, buf).mu;
                };
                const auto res = shapley_exact(f, xs, bg, chosen);
                for (std::size_t j = 0; j < sel.size(); ++j) tm.phi(r, j) = res.attributions[j].phi;
            }
            tm.importance = global_importance(chosen, tm.phi, &values);
        }

        keys_ = config_.key_attributes;
        if (keys_.empty()) {
            keys_ = targets_;
            if (keys_.size() > 15) keys_.resize(15);
            if (keys_.empty()) {
                for (std::size_t c = 0; c < std::min<std::size_t>(3, table_.cols()); ++c) keys_.push_back(table_.column(c).name);
            }
        }
        if (keys_.size() > 15) fail(ErrorKind::TooManyKeyAttrs, "at most 15 key attributes");
        for (const auto& k : keys_) (void)table_.column_index(k);
        compute_factors();
    });

    compute_embedding();
    tree_ = HistoryTree(table_.row_ids());
}

void Session::compute_factors() {
    std::map<std::string, FactorSource> sources;
    InfluenceContext ctx;
    ctx.table = &table_;
    for (const auto& [name, tm] : models_) {
        sources[name] = FactorSource::Predicted;
        ctx.shap[name] = tm.importance;
    }
    InfluenceSet out;
    out.k = factors_per_key(keys_.size());
    out.keys = keys_;
    for (const auto& key : keys_) {
        std::vector<Factor> sector;
        try {
            sector = influencing_factors({key}, sources, ctx).sectors.at(key);
        } catch (const Error& e) {
            // A constant key attribute has no correlation partners.
            if (e.kind() != ErrorKind::UndefinedCorrelation) throw;
        }
        if (sector.size() > static_cast<std::size_t>(out.k)) sector.resize(static_cast<std::size_t>(out.k));
        out.sectors[key] = std::move(sector);
    }
    factors_ = std::move(out);
}

void Session::compute_embedding() {
    std::set<std::string> wanted(keys_.begin(), keys_.end());
    for (const auto& [_, sector] : factors_.sectors) {
        for (const auto& f : sector) wanted.insert(f.name);
    }
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table_.cols(); ++c) {
        if (wanted.count(table_.column(c).name)) cols.push_back(c);
    }
    const std::size_t n = table_.rows();
    stage("embed", [&] {
        const Matrix xs(n, cols.size(), normalized_.dense(cols));
        const double perplexity = auto_perplexity(n, config_.tsne.perplexity);
        if (perplexity <= 0.0) {
            embedding_ = trivial_embedding(n, config_.tsne.seed).points;
        } else {
            auto params = config_.tsne;
            params.perplexity = perplexity;
            embedding_ = tsne_embed(xs, params).points;
        }
    });
    stage("cluster", [&] {
        if (n < 2) {
            labels_.assign(n, 0);
            return;
        }
        double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            x0 = std::min(x0, embedding_(i, 0));
            x1 = std::max(x1, embedding_(i, 0));
            y0 = std::min(y0, embedding_(i, 1));
            y1 = std::max(y1, embedding_(i, 1));
        }
        const double span = std::max({x1 - x0, y1 - y0, 1e-12});
        Matrix unit(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            unit(i, 0) = (embedding_(i, 0) - x0) / span;
            unit(i, 1) = (embedding_(i, 1) - y0) / span;
        }
        const double eps = config_.dbscan_eps > 0 ? config_.dbscan_eps : eps_elbow(unit, config_.dbscan_min_pts);
        labels_ = eps > 0 ? dbscan(unit, eps, config_.dbscan_min_pts).labels : std::vector<int>(n, 0);
    });
}

std::vector<std::size_t> Session::rows_of(const std::vector<std::string>& ids) const {
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(table_.row_index(id));
    return out;
}

json Session::summary() const {
    std::lock_guard lk(mutex_);
    json cols = json::array();
    for (const auto& c : table_.columns()) {
        cols.push_back({{"name", c.name}, {"group", attribute_group(c)}, {"kind", kind_name(table_.kind(c.name))}});
    }
    std::size_t imputed = 0, predicted = 0;
    for (std::size_t r = 0; r < provenance_.rows(); ++r) {
        for (std::size_t c = 0; c < provenance_.cols(); ++c) {
            imputed += provenance_.at(r, c) == Provenance::Imputed;
            predicted += provenance_.at(r, c) == Provenance::Predicted;
        }
    }
    json emb = json::array();
    for (std::size_t i = 0; i < table_.rows(); ++i) {
        emb.push_back({{"id", table_.row_ids()[i]},
                       {"x", embedding_(i, 0)},
                       {"y", embedding_(i, 1)},
                       {"cluster", labels_[i]}});
    }
    return {{"session_id", id_},
            {"rows", table_.rows()},
            {"columns", cols},
            {"targets", targets_},
            {"key_attributes", keys_},
            {"k", factors_.k},
            {"report",
             {{"dropped_rows", report_.dropped_rows},
              {"dropped_columns", report_.dropped_columns},
              {"imputed_cells", imputed},
              {"predicted_cells", predicted}}},
            {"embedding", emb},
            {"current", current_},
            {"history", to_json(tree_, current_)}};
}

json Session::history(std::optional<int> replay_node) const {
    std::lock_guard lk(mutex_);
    json out = to_json(tree_, current_);
    if (replay_node) {
        const FilterContext ctx{&table_, &embedding_};
        out["replay"] = {{"node", *replay_node},
                         {"path", tree_.path(*replay_node)},
                         {"retained", replay(tree_, *replay_node, ctx)}};
    }
    return out;
}

json Session::post_filter(const json& body) {
    std::lock_guard lk(mutex_);
    if (!body.is_object() || !body.contains("filter")) fail(ErrorKind::Schema, "body needs a filter object");
    int parent = current_;
    if (body.contains("parent") && !body["parent"].is_null()) {
        if (!body["parent"].is_number_integer()) fail(ErrorKind::Schema, "parent must be an integer node id");
        parent = body["parent"].get<int>();
    }
    const auto& base = tree_.node(parent).retained;
    const auto spec = filter_from_json(body["filter"]);
    const FilterContext ctx{&table_, &embedding_};
    auto retained = apply_filter(ctx, base, spec);

    std::optional<TopVariation> top;
    if (spec.kind != FilterKind::Range) {
        // Selected versus the rest of the parent selection.
        const std::set<std::string> chosen(retained.begin(), retained.end());
        std::vector<int> groups;
        for (const auto& id : base) groups.push_back(chosen.count(id) ? 0 : 1);
        const auto sub = table_.select_rows(rows_of(base));
        try {
            top = anova_top_attribute(sub, groups);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientData) throw;
        }
    }
    current_ = tree_.add(parent, spec, retained, top);
    const auto tree = to_json(tree_, current_);
    return {{"node", tree["nodes"][static_cast<std::size_t>(current_)]},
            {"retained", retained},
            {"retained_count", retained.size()},
            {"current", current_}};
}

json Session::set_key_attributes(const json& body) {
    std::lock_guard lk(mutex_);
    if (!body.is_object() || !body.contains("attributes") || !body["attributes"].is_array()) {
        fail(ErrorKind::Schema, "body needs an attributes array");
    }
    std::vector<std::string> keys;
    for (const auto& a : body["attributes"]) {
        if (!a.is_string()) fail(ErrorKind::Schema, "attributes must be strings");
        keys.push_back(a.get<std::string>());
    }
    if (keys.empty()) fail(ErrorKind::Spec, "at least one key attribute is required");
    if (keys.size() > 15) fail(ErrorKind::TooManyKeyAttrs, "at most 15 key attributes");
    if (std::set<std::string>(keys.begin(), keys.end()).size() != keys.size()) {
        fail(ErrorKind::Spec, "key attributes repeat");
    }
    for (const auto& k : keys) (void)table_.column_index(k);
    keys_ = std::move(keys);
    compute_factors();
    compute_embedding();
    ++keys_version_;
    layout_cache_.clear();
    return {{"key_attributes", keys_}, {"n", keys_.size()}, {"k", factors_.k}};
}

json Session::distribution(int bins) const {
    std::lock_guard lk(mutex_);
    if (bins < 1) fail(ErrorKind::Spec, "bins must be >= 1");
    const auto& ids = tree_.node(current_).retained;
    const auto rows = rows_of(ids);
    const auto order = grouped_columns(table_);
    json axes = json::array();
    std::vector<std::pair<std::string, std::string>> pairs;
    if (!rows.empty()) {
        for (auto c : order) axes.push_back(to_json(axis_stats(table_, table_.column(c).name, bins, rows)));
    }
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto& a = table_.column(order[i]).name;
        const auto& b = table_.column(order[i + 1]).name;
        if (uncertainty_.count(a) || uncertainty_.count(b)) pairs.emplace_back(a, b);
    }
    json scatters = json::array();
    for (const auto& s : uncertainty_pairs(pairs, uncertainty_, ids)) scatters.push_back(to_json(s));
    return {{"node", current_}, {"retained_count", ids.size()}, {"bins", bins}, {"axes", axes}, {"uncertainty", scatters}};
}

bool Session::begin_layout() noexcept { return !layout_running_.exchange(true); }

void Session::end_layout() noexcept { layout_running_.store(false); }

json Session::discovery(const std::atomic<bool>* cancel) {
    std::unique_lock lk(mutex_);
    const auto key = std::make_pair(current_, keys_version_);
    if (const auto it = layout_cache_.find(key); it != layout_cache_.end()) return it->second;
    const auto ids = tree_.node(current_).retained;
    if (ids.empty()) throw HttpError(400, "empty_selection", "the current node retains no compounds");
    if (!begin_layout()) throw HttpError(409, "layout_running", "a layout job is already running");

    const auto rows = rows_of(ids);
    const Matrix pts = embedding_.select_rows(rows);
    ClusterLabels sub;
    std::set<int> distinct;
    for (auto r : rows) {
        sub.labels.push_back(labels_[r]);
        if (labels_[r] >= 0) distinct.insert(labels_[r]);
        else ++sub.noise;
    }
    sub.k = static_cast<int>(distinct.size());
    const auto params = config_.layout;
    lk.unlock();

    LayoutScene scene;
    try {
        scene = run_layout(pts, ids, sub, params, cancel);
    } catch (const Error& e) {
        end_layout();
        throw PipelineError("layout", e.kind(), e.what());
    } catch (...) {
        end_layout();
        throw;
    }

    lk.lock();
    json out = glyph_payload(scene);
    out["node"] = key.first;
    if (keys_version_ == key.second) layout_cache_[key] = out;
    end_layout();
    return out;
}

json Session::glyph_payload(const LayoutScene& scene) const {
    const int k = factors_.k;
    const auto rows = rows_of(scene.ids);

    // Per-compound bar heights for predicted keys are |phi| scaled by the
    // largest |phi| in that sector over the shown compounds.
    std::map<std::string, std::vector<std::size_t>> phi_cols;
    std::map<std::string, double> phi_max;
    for (const auto& key : keys_) {
        const auto m = models_.find(key);
        if (m == models_.end()) continue;
        auto& cols = phi_cols[key];
        double top = 0.0;
        for (const auto& f : factors_.sectors.at(key)) {
            const auto& feats = m->second.shap_features;
            const auto j = static_cast<std::size_t>(std::find(feats.begin(), feats.end(), f.name) - feats.begin());
            cols.push_back(j);
            for (auto r : rows) top = std::max(top, std::abs(m->second.phi(r, j)));
        }
        phi_max[key] = top;
    }

    json glyphs = json::array();
    for (std::size_t i = 0; i < scene.ids.size(); ++i) {
        const auto r = rows[i];
        json sectors = json::array();
        for (const auto& key : keys_) {
            const auto& factors = factors_.sectors.at(key);
            const auto m = models_.find(key);
            json bars = json::array();
            for (int b = 0; b < k; ++b) {
                const auto bi = static_cast<std::size_t>(b);
                if (bi >= factors.size()) {
                    bars.push_back({{"factor", nullptr}, {"height", 0.0}, {"direction", "positive"}, {"order", b}});
                    continue;
                }
                const auto& f = factors[bi];
                double h = std::abs(f.strength);
                if (m != models_.end()) {
                    const double top = phi_max.at(key);
                    h = top > 0 ? std::abs(m->second.phi(r, phi_cols.at(key)[bi])) / top : 0.0;
                }
                bars.push_back({{"factor", f.name},
                                {"height", std::clamp(h, 0.0, 1.0)},
                                {"direction", std::string(to_string(f.direction))},
                                {"order", b}});
            }
            const auto c = normalized_.column_index(key);
            sectors.push_back({{"attr", key}, {"value", normalized_.at(r, c).value_or(0.5)}, {"bars", bars}});
        }
        glyphs.push_back({{"id", scene.ids[i]},
                          {"x", scene.final[i].x},
                          {"y", scene.final[i].y},
                          {"cluster", scene.labels[i]},
                          {"sectors", sectors}});
    }
    json polys = json::array(), edges = json::array();
    for (const auto& p : scene.polygons) polys.push_back(to_json(p));
    for (const auto& [a, b] : scene.edges) edges.push_back({a, b});
    return {{"key_attributes", keys_},
            {"n", keys_.size()},
            {"k", k},
            {"glyph_radius", scene.glyph_radius},
            {"glyphs", glyphs},
            {"polygons", polys},
            {"edges", edges},
            {"omitted", scene.omitted},
            {"cartogram",
             {{"converged", scene.cartogram_converged},
              {"steps", scene.cartogram_steps},
              {"max_area_error", scene.cartogram_error}}},
            {"mean_displacement", scene.mean_displacement}};
}

json Session::comparison(const std::vector<std::string>& ids) const {
    std::lock_guard lk(mutex_);
    if (ids.empty()) throw HttpError(400, "bad_request", "comparison needs at least one id");
    const auto& retained = tree_.node(current_).retained;
    const std::set<std::string> in_node(retained.begin(), retained.end());
    std::vector<std::string> unique;
    for (const auto& id : ids) {
        if (!in_node.count(id)) throw HttpError(400, "unknown_id", "compound " + id + " is not in the current node");
        if (std::find(unique.begin(), unique.end(), id) == unique.end()) unique.push_back(id);
    }
    const auto order = formula_order(unique);
    const auto rows = rows_of(order);
    const auto cols = grouped_columns(table_);

    json columns = json::array();
    std::vector<json> cells(rows.size(), json::array());
    for (auto c : cols) {
        const auto& col = table_.column(c);
        columns.push_back({{"attr", col.name}, {"group", attribute_group(col)}});
        double lo = INFINITY, hi = -INFINITY;
        for (auto r : rows) {
            if (const auto& v = table_.at(r, c)) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
        const auto unc = uncertainty_.find(col.name);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto r = rows[i];
            const auto& v = table_.at(r, c);
            const auto prov = provenance_.at(r, c);
            json cell = {{"provenance", std::string(to_string(prov))}, {"radius", nullptr}, {"uncertainty", nullptr}};
            cell["value"] = v ? json(*v) : json(nullptr);
            cell["color"] = v && hi > lo ? (*v - lo) / (hi - lo) : 0.5;
            if (prov == Provenance::Predicted) {
                cell["shape"] = "circle";
                std::optional<double> u;
                if (unc != uncertainty_.end()) {
                    if (const auto it = unc->second.find(order[i]); it != unc->second.end()) u = it->second;
                }
                if (u) cell["uncertainty"] = *u;
                cell["radius"] = radius_scalar(u);
            } else if (prov == Provenance::Imputed) {
                cell["shape"] = "triangle";
            } else {
                cell["shape"] = "rect";
            }
            cells[i].push_back(std::move(cell));
        }
    }
    return {{"node", current_}, {"rows", order}, {"columns", columns}, {"cells", cells}};
}

}  // namespace cspace
