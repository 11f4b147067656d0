// cif: headless driver for the cluster similarity engine and launcher for the
// HTTP service.
//
// Exit codes: 0 ok, 1 usage, 2 data or selection error, 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "cif/analysis.hpp"
#include "cif/canonical_json.hpp"
#include "cif/error.hpp"
#include "cif/importance.hpp"
#include "cif/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) cif::fail(cif::ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    out << text << '\n';
}

std::pair<std::string, std::string> split_pair(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
        cif::fail(cif::ErrorKind::InvalidArgument, "--source-pair expects \"FEATURE_X,FEATURE_Y\"");
    return {text.substr(0, comma), text.substr(comma + 1)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster similarity across feature-pair projections"};
    app.require_subcommand(1);
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "Worker threads for the pair grid")->check(CLI::PositiveNumber);

    // serve
    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    std::optional<int> port;
    std::optional<std::string> cache_dir;
    std::optional<std::string> default_dataset;
    std::string host = "0.0.0.0";
    serve->add_option("--port", port, "Listen port (env CIF_PORT, default 8080)");
    serve->add_option("--cache", cache_dir, "Grid cache directory (env CIF_CACHE)");
    serve->add_option("--default-dataset", default_dataset, "CSV preloaded at startup (env CIF_DEFAULT_DATASET)");
    serve->add_option("--host", host, "Bind address");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Run grid, similarity and seriation for one source cluster");
    std::string input, out_path, algorithm = "kmeans", source_pair, aggregation = "max", ordering = "olo";
    cif::ClusteringParams params;
    std::optional<std::size_t> source_row;
    std::optional<int> source_cluster;
    std::vector<std::string> excluded;
    bool with_timings = false;
    analyze->add_option("--input", input, "CSV file")->required();
    analyze->add_option("--algorithm", algorithm, "kmeans or dbscan")
        ->check(CLI::IsMember({"kmeans", "dbscan"}, CLI::ignore_case));
    analyze->add_option("--k", params.k, "Clusters for k-means");
    analyze->add_option("--eps", params.eps, "DBSCAN radius in z-score units");
    analyze->add_option("--min-samples", params.min_samples, "DBSCAN core threshold");
    analyze->add_option("--seed", params.seed, "k-means++ seed");
    analyze->add_option("--max-iter", params.max_iter, "Lloyd iteration cap");
    analyze->add_option("--tol", params.tol, "Centroid shift tolerance");
    analyze->add_option("--source-pair", source_pair, "\"FEATURE_X,FEATURE_Y\"")->required();
    auto* row_opt = analyze->add_option("--source-row", source_row, "Row whose cluster is the source");
    auto* cluster_opt = analyze->add_option("--source-cluster", source_cluster, "Source cluster id");
    row_opt->excludes(cluster_opt);
    analyze->add_option("--aggregation", aggregation, "max or mean")
        ->check(CLI::IsMember({"max", "mean"}, CLI::ignore_case));
    analyze->add_option("--ordering", ordering, "original or olo")
        ->check(CLI::IsMember({"original", "olo"}, CLI::ignore_case));
    analyze->add_option("--exclude", excluded, "Numeric columns kept out of the pair grid");
    analyze->add_flag("--timings", with_timings, "Add wall-clock timings to the report");
    analyze->add_option("--out", out_path, "Report path")->required();

    // importance
    auto* importance = app.add_subcommand("importance", "Rank features by mean |Shapley value| against a target");
    std::string imp_input, imp_target, imp_out;
    double lambda = 1.0;
    importance->add_option("--input", imp_input, "CSV file")->required();
    importance->add_option("--target", imp_target, "Target column")->required();
    importance->add_option("--lambda", lambda, "Ridge penalty")->check(CLI::NonNegativeNumber);
    importance->add_option("--out", imp_out, "Output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*serve) {
            cif::ServiceConfig config;
            config.threads = threads;
            if (!cache_dir) cache_dir = env("CIF_CACHE");
            if (cache_dir) config.cache_dir = *cache_dir;
            if (!default_dataset) default_dataset = env("CIF_DEFAULT_DATASET");
            if (default_dataset) config.default_dataset = *default_dataset;
            if (!port) {
                if (auto p = env("CIF_PORT")) {
                    try {
                        port = std::stoi(*p);
                    } catch (const std::exception&) {
                        std::cerr << "error: invalid CIF_PORT '" << *p << "'\n";
                        return kExitUsage;
                    }
                } else {
                    port = 8080;
                }
            }
            cif::Service service(std::move(config));
            httplib::Server server;
            service.mount(server);
            std::cerr << "listening on " << host << ':' << *port;
            if (service.default_dataset_id()) std::cerr << " (default dataset " << *service.default_dataset_id() << ')';
            std::cerr << '\n';
            if (!server.listen(host, *port)) {
                std::cerr << "error: cannot listen on " << host << ':' << *port << '\n';
                return kExitInternal;
            }
            return kExitOk;
        }

        if (*analyze) {
            params.algorithm = cif::parse_algorithm(algorithm);
            params.validate();
            cif::AnalysisRequest request;
            request.params = params;
            std::tie(request.feature_x, request.feature_y) = split_pair(source_pair);
            request.source_row = source_row;
            request.source_cluster = source_cluster;
            if (!source_row && !source_cluster)
                cif::fail(cif::ErrorKind::InvalidArgument, "give --source-row or --source-cluster");
            request.aggregation = cif::parse_aggregation(aggregation);
            request.ordering = cif::parse_ordering(ordering);
            request.excluded = excluded;

            const auto t0 = std::chrono::steady_clock::now();
            const cif::Dataset dataset = cif::load_csv_file(input);
            const double load_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            cif::GridCache cache;
            const auto result = cif::run_analysis(dataset, cache, request, threads);
            auto report = cif::report_json(result);
            if (with_timings) {
                report["timings"] = cif::timings_json(result.timings);
                report["timings"]["load_ms"] = load_ms;
            }
            write_file(out_path, cif::canonical_dump(report));
            return kExitOk;
        }

        if (*importance) {
            const cif::Dataset dataset = cif::load_csv_file(imp_input);
            const auto model = cif::fit_ridge(dataset, imp_target, lambda);
            const auto ranking = cif::rank_features(cif::linear_shapley(model, dataset), imp_target);
            write_file(imp_out, cif::canonical_dump(cif::importance_json(ranking, lambda)));
            return kExitOk;
        }
    } catch (const cif::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == cif::ErrorKind::Internal ? kExitInternal : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
