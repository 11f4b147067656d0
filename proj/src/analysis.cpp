#include "cif/analysis.hpp"

#include <chrono>
#include <numeric>

#include "cif/canonical_json.hpp"
#include "cif/error.hpp"

namespace cif {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

json pair_json(const PairGrid& grid, const FeaturePairKey& key) {
    return json::array({grid.features[key.i], grid.features[key.j]});
}

json cells_json(const SimilarityMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.size(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.size(); ++c) {
            const auto& cell = m.at(r, c);
            row.push_back(cell ? json(*cell) : json(nullptr));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

AnalysisResult run_analysis(const Dataset& dataset, GridCache& cache, const AnalysisRequest& request,
                            std::size_t threads) {
    if (request.source_row.has_value() == request.source_cluster.has_value())
        fail(ErrorKind::InvalidArgument, "give exactly one of a source row or a source cluster");

    AnalysisResult result;
    auto t0 = Clock::now();
    result.grid = cache.compute_grid(dataset, request.params, threads, request.excluded);
    result.timings.grid_ms = elapsed_ms(t0);
    const PairGrid& grid = *result.grid;

    t0 = Clock::now();
    const FeaturePairKey key = grid.key_for(request.feature_x, request.feature_y);
    if (request.source_row) {
        result.source = resolve_point(grid, key, *request.source_row);
        result.source_row = request.source_row;
    } else {
        result.source = select_cluster(grid, key, *request.source_cluster);
    }
    result.list = rank_clusters(result.source, grid);
    result.matrix = build_matrix(result.source, grid, request.aggregation);
    result.timings.similarity_ms = elapsed_ms(t0);

    t0 = Clock::now();
    const DistanceMatrix distances = feature_distances(result.matrix);
    if (request.ordering == OrderingMethod::Olo) {
        result.linkage = hierarchical_cluster(distances);
        result.ordering = optimal_leaf_order(*result.linkage, distances);
    } else {
        result.ordering.method = OrderingMethod::Original;
        result.ordering.permutation.resize(result.matrix.size());
        std::iota(result.ordering.permutation.begin(), result.ordering.permutation.end(), std::size_t{0});
        result.ordering.cost = ordering_cost(result.ordering.permutation, distances);
    }
    result.ordered = apply_order(result.matrix, result.ordering.permutation);
    result.timings.seriation_ms = elapsed_ms(t0);
    return result;
}

json report_json(const AnalysisResult& r) {
    const PairGrid& grid = *r.grid;

    json source{{"pair", pair_json(grid, r.source.pair)},
                {"cluster_id", r.source.cluster_id},
                {"size", r.source.members.size()},
                {"members", r.source.members},
                {"row_index", r.source_row ? json(*r.source_row) : json(nullptr)}};

    json list = json::array();
    for (const auto& rec : r.list)
        list.push_back({{"pair", pair_json(grid, rec.pair)},
                        {"cluster_id", rec.cluster_id},
                        {"jaccard", rec.jaccard},
                        {"cluster_size", rec.cluster_size}});

    const bool olo = r.ordering.method == OrderingMethod::Olo;
    json matrix{{"features", r.ordered.features},
                {"cells", cells_json(r.ordered)},
                {"permutation", r.ordering.permutation},
                {"aggregation", to_string(r.ordered.aggregation)},
                {"cost", olo ? json(r.ordering.cost) : json(nullptr)}};

    json linkage = json::array();
    if (r.linkage)
        for (const auto& m : r.linkage->merges) linkage.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}});
    json ordering{{"method", to_string(r.ordering.method)},
                  {"permutation", r.ordering.permutation},
                  {"cost", r.ordering.cost},
                  {"linkage", std::move(linkage)}};

    json warnings = json::array();
    for (const auto& [key, entry] : grid.entries)
        if (!entry.ok()) warnings.push_back({{"pair", pair_json(grid, key)}, {"error", entry.error}});

    return json{{"schema_version", kSchemaVersion},
                {"source", std::move(source)},
                {"source_cluster", r.source.cluster_id},
                {"list", std::move(list)},
                {"matrix", std::move(matrix)},
                {"ordering", std::move(ordering)},
                {"warnings", std::move(warnings)},
                {"grid", {{"features", grid.features},
                          {"pairs", grid.entries.size()},
                          {"failed", grid.failures()},
                          {"params", params_json(grid.params)}}}};
}

json timings_json(const AnalysisTimings& t) {
    return {{"grid_ms", t.grid_ms}, {"similarity_ms", t.similarity_ms}, {"seriation_ms", t.seriation_ms}};
}

json dataset_json(const Dataset& dataset) {
    json features = json::array();
    for (const auto& c : dataset.columns()) {
        json f{{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
        if (c.stats)
            f["stats"] = {{"min", c.stats->min},
                          {"max", c.stats->max},
                          {"mean", c.stats->mean},
                          {"std", c.stats->std},
                          {"distinct_count", c.stats->distinct_count}};
        else
            f["stats"] = nullptr;
        features.push_back(std::move(f));
    }
    return {{"schema_version", kSchemaVersion},
            {"dataset_id", dataset.id()},
            {"n_rows", dataset.n_rows()},
            {"dropped_rows", dataset.dropped_rows()},
            {"features", std::move(features)}};
}

json histogram_json(const Histogram& h) {
    return {{"schema_version", kSchemaVersion},
            {"feature", h.feature},
            {"bin_count", h.bin_count},
            {"edges", h.edges},
            {"counts", h.counts}};
}

json params_json(const ClusteringParams& p) {
    json out{{"algorithm", to_string(p.algorithm)}, {"seed", p.seed}};
    if (p.algorithm == Algorithm::KMeans) {
        out["k"] = p.k;
        out["max_iter"] = p.max_iter;
        out["tol"] = p.tol;
    } else {
        out["eps"] = p.eps;
        out["min_samples"] = p.min_samples;
    }
    return out;
}

json labeling_json(const ClusterLabeling& l) {
    json out{{"schema_version", kSchemaVersion},
             {"labels", l.labels},
             {"n_clusters", l.n_clusters},
             {"params", params_json(l.params)}};
    if (l.params.algorithm == Algorithm::KMeans) out["inertia"] = l.inertia;
    return out;
}

json importance_json(const ImportanceRanking& ranking, double lambda) {
    json features = json::array();
    for (std::size_t j = 0; j < ranking.features.size(); ++j)
        features.push_back({{"name", ranking.features[j]}, {"score", ranking.scores[j]}, {"rank", ranking.ranks[j]}});
    return {{"schema_version", kSchemaVersion},
            {"target", ranking.target},
            {"lambda", lambda},
            {"features", std::move(features)}};
}

ClusteringParams params_from_json(const json& body) {
    if (!body.is_object()) fail(ErrorKind::InvalidArgument, "request body must be a JSON object");
    ClusteringParams p;
    try {
        if (body.contains("algorithm")) p.algorithm = parse_algorithm(body.at("algorithm").get<std::string>());
        if (body.contains("params")) {
            const json& q = body.at("params");
            if (!q.is_object()) fail(ErrorKind::InvalidArgument, "'params' must be an object");
            if (q.contains("k")) p.k = q.at("k").get<int>();
            if (q.contains("eps")) p.eps = q.at("eps").get<double>();
            if (q.contains("min_samples")) p.min_samples = q.at("min_samples").get<int>();
            if (q.contains("seed")) p.seed = q.at("seed").get<std::uint64_t>();
            if (q.contains("max_iter")) p.max_iter = q.at("max_iter").get<int>();
            if (q.contains("tol")) p.tol = q.at("tol").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("malformed clustering parameters: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace cif
