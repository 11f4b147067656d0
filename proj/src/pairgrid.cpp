#include "cif/pairgrid.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cif/error.hpp"

namespace cif {

namespace {

using nlohmann::json;

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        out += n;
        out.push_back('\x1f');
    }
    return out;
}

json grid_params_to_json(const ClusteringParams& p) {
    return json{{"algorithm", to_string(p.algorithm)}, {"k", p.k},
                {"eps", p.eps},
                {"min_samples", p.min_samples},
                {"seed", p.seed},
                {"max_iter", p.max_iter},
                {"tol", p.tol}};
}

ClusteringParams grid_params_from_json(const json& j) {
    ClusteringParams p;
    p.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    p.k = j.at("k").get<int>();
    p.eps = j.at("eps").get<double>();
    p.min_samples = j.at("min_samples").get<int>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.max_iter = j.at("max_iter").get<int>();
    p.tol = j.at("tol").get<double>();
    return p;
}

}  // namespace

std::vector<std::string> pairable_features(const Dataset& dataset, const std::vector<std::string>& excluded) {
    for (const auto& name : excluded) dataset.numeric_column(name);
    std::vector<std::string> out;
    for (auto& name : dataset.numeric_features())
        if (std::find(excluded.begin(), excluded.end(), name) == excluded.end()) out.push_back(std::move(name));
    return out;
}

std::vector<FeaturePairKey> enumerate_pairs(std::size_t feature_count) {
    if (feature_count < 2)
        fail(ErrorKind::InvalidArgument, "at least two numeric features are needed to form a pair");
    std::vector<FeaturePairKey> keys;
    keys.reserve(feature_count * (feature_count - 1) / 2);
    for (std::size_t i = 0; i < feature_count; ++i)
        for (std::size_t j = i + 1; j < feature_count; ++j) keys.push_back({i, j});
    return keys;
}

std::vector<FeaturePairKey> enumerate_pairs(const Dataset& dataset, const std::vector<std::string>& excluded) {
    return enumerate_pairs(pairable_features(dataset, excluded).size());
}

std::size_t PairGrid::failures() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const auto& kv) { return !kv.second.ok(); }));
}

const PairEntry* PairGrid::find(const FeaturePairKey& key) const {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

FeaturePairKey PairGrid::key_for(const std::string& a, const std::string& b) const {
    auto index_of = [&](const std::string& name) {
        const auto it = std::find(features.begin(), features.end(), name);
        if (it == features.end())
            fail(ErrorKind::NotFound, "feature '" + name + "' is not part of the pair grid");
        return static_cast<std::size_t>(it - features.begin());
    };
    const std::size_t ia = index_of(a);
    const std::size_t ib = index_of(b);
    if (ia == ib) fail(ErrorKind::InvalidArgument, "a feature pair needs two distinct features");
    return {std::min(ia, ib), std::max(ia, ib)};
}

ClusterLabeling cluster_pair(const Dataset& dataset, const std::string& feature_x,
                             const std::string& feature_y, const ClusteringParams& params) {
    if (feature_x == feature_y) fail(ErrorKind::InvalidArgument, "a feature pair needs two distinct features");
    const auto zx = zscore(dataset, feature_x);
    const auto zy = zscore(dataset, feature_y);
    std::vector<Point2> points(zx.size());
    for (std::size_t r = 0; r < points.size(); ++r) points[r] = {zx[r], zy[r]};
    return cluster_2d(points, params);
}

GridCache::GridCache(std::optional<std::filesystem::path> directory) : directory_(std::move(directory)) {}

ClusterLabeling GridCache::compute_pair(const Dataset& dataset, const std::string& feature_x,
                                        const std::string& feature_y, const ClusteringParams& params) {
    params.validate();
    const std::string key = dataset.id() + '\x1f' + feature_x + '\x1f' + feature_y + '\x1f' + params.canonical();

    std::promise<ClusterLabeling> promise;
    PairFuture future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        if (auto it = pairs_.find(key); it != pairs_.end()) {
            ++stats_.pair_hits;
            future = it->second;
        } else {
            ++stats_.pair_misses;
            future = promise.get_future().share();
            pairs_.emplace(key, future);
            owner = true;
        }
    }
    if (owner) {
        try {
            promise.set_value(cluster_pair(dataset, feature_x, feature_y, params));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

std::string GridCache::params_hash(const ClusteringParams& params, const std::vector<std::string>& features) {
    return content_hash(params.canonical() + '\x1e' + join_names(features));
}

std::filesystem::path GridCache::grid_path(const std::string& dataset_id, const std::string& hash) const {
    return *directory_ / dataset_id / hash / "grid.json";
}

std::shared_ptr<const PairGrid> GridCache::compute_grid(const Dataset& dataset, const ClusteringParams& params,
                                                        std::size_t parallelism,
                                                        const std::vector<std::string>& excluded) {
    params.validate();
    auto features = pairable_features(dataset, excluded);
    enumerate_pairs(features.size());
    const std::string key = dataset.id() + '\x1e' + params.canonical() + '\x1e' + join_names(features);

    std::promise<std::shared_ptr<const PairGrid>> promise;
    GridFuture future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        if (auto it = grids_.find(key); it != grids_.end()) {
            ++stats_.grid_hits;
            future = it->second;
        } else {
            ++stats_.grid_misses;
            future = promise.get_future().share();
            grids_.emplace(key, future);
            owner = true;
        }
    }
    if (owner) {
        try {
            promise.set_value(build_grid(dataset, params, parallelism, std::move(features)));
        } catch (...) {
            promise.set_exception(std::current_exception());
            std::lock_guard lock(mutex_);
            grids_.erase(key);
        }
    }
    return future.get();
}

std::shared_ptr<const PairGrid> GridCache::build_grid(const Dataset& dataset, const ClusteringParams& params,
                                                      std::size_t parallelism, std::vector<std::string> features) {
    const std::string hash = params_hash(params, features);
    if (directory_) {
        const auto path = grid_path(dataset.id(), hash);
        if (std::ifstream in(path); in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            try {
                auto cached = deserialize_grid(buf.str());
                if (cached.dataset_id == dataset.id() && cached.params == params && cached.features == features &&
                    cached.complete) {
                    std::lock_guard lock(mutex_);
                    ++stats_.disk_loads;
                    return std::make_shared<const PairGrid>(std::move(cached));
                }
            } catch (const std::exception&) {
                // unreadable or stale cache file; recompute and overwrite
            }
        }
    }

    const auto keys = enumerate_pairs(features.size());
    std::vector<PairEntry> results(keys.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < keys.size(); idx = next++) {
            const auto& k = keys[idx];
            try {
                results[idx].labeling = compute_pair(dataset, features[k.i], features[k.j], params);
            } catch (const std::exception& e) {
                results[idx].error = e.what();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, keys.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }

    auto grid = std::make_shared<PairGrid>();
    grid->dataset_id = dataset.id();
    grid->params = params;
    grid->features = std::move(features);
    for (std::size_t idx = 0; idx < keys.size(); ++idx) grid->entries.emplace(keys[idx], std::move(results[idx]));
    grid->complete = true;
    if (grid->failures() == grid->entries.size())
        fail(ErrorKind::InvalidArgument, "clustering failed for every feature pair: " + grid->entries.begin()->second.error);

    if (directory_) {
        const auto path = grid_path(dataset.id(), hash);
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        const auto tmp = path.string() + ".tmp";
        if (std::ofstream out(tmp, std::ios::binary); out) {
            out << serialize_grid(*grid);
            out.close();
            std::filesystem::rename(tmp, path, ec);
        }
    }
    return grid;
}

std::string serialize_grid(const PairGrid& grid) {
    json entries = json::array();
    for (const auto& [key, entry] : grid.entries) {
        json e{{"pair", {key.i, key.j}}};
        if (entry.ok()) {
            e["labels"] = entry.labeling->labels;
            e["n_clusters"] = entry.labeling->n_clusters;
            e["inertia"] = entry.labeling->inertia;
        } else {
            e["error"] = entry.error;
        }
        entries.push_back(std::move(e));
    }
    json doc{{"format", "cif-grid"},
             {"version", kGridFormatVersion},
             {"dataset_id", grid.dataset_id},
             {"params", grid_params_to_json(grid.params)},
             {"params_canonical", grid.params.canonical()},
             {"features", grid.features},
             {"complete", grid.complete},
             {"entries", std::move(entries)}};
    return doc.dump();
}

PairGrid deserialize_grid(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.at("format") != "cif-grid") fail(ErrorKind::InvalidArgument, "not a grid file");
    if (doc.at("version").get<int>() != kGridFormatVersion)
        fail(ErrorKind::InvalidArgument, "unsupported grid file version");
    PairGrid grid;
    grid.dataset_id = doc.at("dataset_id").get<std::string>();
    grid.params = grid_params_from_json(doc.at("params"));
    grid.features = doc.at("features").get<std::vector<std::string>>();
    grid.complete = doc.at("complete").get<bool>();
    for (const auto& e : doc.at("entries")) {
        const FeaturePairKey key{e.at("pair").at(0).get<std::size_t>(), e.at("pair").at(1).get<std::size_t>()};
        PairEntry entry;
        if (e.contains("error")) {
            entry.error = e.at("error").get<std::string>();
        } else {
            ClusterLabeling l;
            l.labels = e.at("labels").get<std::vector<int>>();
            l.n_clusters = e.at("n_clusters").get<int>();
            l.inertia = e.at("inertia").get<double>();
            l.params = grid.params;
            entry.labeling = std::move(l);
        }
        grid.entries.emplace(key, std::move(entry));
    }
    return grid;
}

GridCache::Stats GridCache::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

}  // namespace cif
