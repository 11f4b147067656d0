#include "cif/service.hpp"

#include <charconv>
#include <cstdio>

#include <httplib.h>
#include <json.hpp>

#include "cif/analysis.hpp"
#include "cif/canonical_json.hpp"
#include "cif/importance.hpp"

namespace cif {

namespace {

using nlohmann::json;

HttpResponse ok(const json& body) { return {200, canonical_dump(body)}; }

json parse_body(std::string_view body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidArgument, std::string("request body is not valid JSON: ") + e.what());
    }
}

std::string required_string(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string())
        fail(ErrorKind::InvalidArgument, std::string("missing string field '") + key + "'");
    return obj.at(key).get<std::string>();
}

double parse_double(const std::string& text, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        fail(ErrorKind::InvalidArgument, std::string("invalid ") + what + " '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string& text, const char* what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        fail(ErrorKind::InvalidArgument, std::string("invalid ") + what + " '" + text + "'");
    return v;
}

template <typename F>
HttpResponse guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return error_response(e);
    }
}

}  // namespace

int http_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return 400;
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Unprocessable: return 422;
        case ErrorKind::Internal: return 500;
    }
    return 500;
}

HttpResponse error_response(const std::exception& e) {
    int status = 500;
    std::string kind = "internal";
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        status = http_status(err->kind());
        kind = status == 400 ? "invalid_argument" : status == 404 ? "not_found" : status == 422 ? "unprocessable" : "internal";
    } else if (dynamic_cast<const json::exception*>(&e) != nullptr) {
        status = 400;
        kind = "invalid_argument";
    }
    return {status, canonical_dump(json{{"schema_version", kSchemaVersion},
                                        {"error", {{"kind", kind}, {"message", e.what()}}}})};
}

Service::Service(ServiceConfig config) : config_(std::move(config)), cache_(config_.cache_dir) {
    if (config_.threads == 0) config_.threads = 1;
    if (config_.default_dataset) default_id_ = register_dataset(load_csv_file(config_.default_dataset->string()));
}

std::string Service::register_dataset(Dataset dataset) {
    std::string id = dataset.id();
    std::unique_lock lock(registry_mutex_);
    datasets_.try_emplace(id, std::make_shared<const Dataset>(std::move(dataset)));
    return id;
}

std::shared_ptr<const Dataset> Service::lookup(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    const auto it = datasets_.find(id);
    if (it == datasets_.end()) fail(ErrorKind::NotFound, "unknown dataset '" + id + "'");
    return it->second;
}

HttpResponse Service::list_datasets() const {
    json ids = json::array();
    {
        std::shared_lock lock(registry_mutex_);
        for (const auto& [id, ds] : datasets_) ids.push_back({{"dataset_id", id}, {"n_rows", ds->n_rows()}});
    }
    return ok({{"schema_version", kSchemaVersion},
               {"datasets", std::move(ids)},
               {"default_dataset_id", default_id_ ? json(*default_id_) : json(nullptr)}});
}

HttpResponse Service::upload(std::string_view csv) {
    return guarded([&] {
        const std::string id = register_dataset(load_csv(csv));
        return ok(dataset_json(*lookup(id)));
    });
}

HttpResponse Service::describe(const std::string& id) const {
    return guarded([&] { return ok(dataset_json(*lookup(id))); });
}

HttpResponse Service::histogram(const std::string& id, const std::string& feature, const std::string& bins) {
    return guarded([&] {
        const auto ds = lookup(id);
        const std::size_t count = bins.empty() ? 10 : parse_count(bins, "bin count");
        return ok(histogram_json(cif::histogram(*ds, feature, count)));
    });
}

HttpResponse Service::normalized(const std::string& id, const std::string& feature) {
    return guarded([&] {
        const auto ds = lookup(id);
        return ok({{"schema_version", kSchemaVersion},
                   {"feature", feature},
                   {"values", column_minmax(*ds, feature)}});
    });
}

HttpResponse Service::cluster(const std::string& id, std::string_view body) {
    return guarded([&] {
        const auto ds = lookup(id);
        const json req = parse_body(body);
        const ClusteringParams params = params_from_json(req);
        const std::string fx = required_string(req, "feature_x");
        const std::string fy = required_string(req, "feature_y");
        json out = labeling_json(cache_.compute_pair(*ds, fx, fy, params));
        out["feature_x"] = fx;
        out["feature_y"] = fy;
        return ok(out);
    });
}

HttpResponse Service::similarity(const std::string& id, std::string_view body) {
    return guarded([&] {
        const auto ds = lookup(id);
        const json req = parse_body(body);
        AnalysisRequest request;
        request.params = params_from_json(req);
        if (!req.contains("source") || !req.at("source").is_object())
            fail(ErrorKind::InvalidArgument, "missing 'source' object");
        const json& source = req.at("source");
        request.feature_x = required_string(source, "feature_x");
        request.feature_y = required_string(source, "feature_y");
        try {
            if (source.contains("row_index")) {
                const auto row = source.at("row_index").get<long long>();
                if (row < 0) fail(ErrorKind::InvalidArgument, "row_index must be nonnegative");
                request.source_row = static_cast<std::size_t>(row);
            }
            if (source.contains("cluster_id")) request.source_cluster = source.at("cluster_id").get<int>();
            if (req.contains("aggregation")) request.aggregation = parse_aggregation(req.at("aggregation").get<std::string>());
            if (req.contains("ordering")) request.ordering = parse_ordering(req.at("ordering").get<std::string>());
            if (req.contains("exclude")) request.excluded = req.at("exclude").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            fail(ErrorKind::InvalidArgument, std::string("malformed similarity request: ") + e.what());
        }
        return ok(report_json(run_analysis(*ds, cache_, request, config_.threads)));
    });
}

HttpResponse Service::importance(const std::string& id, const std::string& target, const std::string& lambda_text) {
    return guarded([&] {
        const auto ds = lookup(id);
        if (target.empty()) fail(ErrorKind::InvalidArgument, "missing 'target'");
        const double lambda = lambda_text.empty() ? 1.0 : parse_double(lambda_text, "lambda");
        char key_buf[64];
        std::snprintf(key_buf, sizeof key_buf, "%.17g", lambda);
        const std::string key = id + '\x1f' + target + '\x1f' + key_buf;
        {
            std::lock_guard lock(importance_mutex_);
            if (auto it = importance_cache_.find(key); it != importance_cache_.end()) return HttpResponse{200, it->second};
        }
        const RidgeModel model = fit_ridge(*ds, target, lambda);
        const std::string body = canonical_dump(importance_json(rank_features(linear_shapley(model, *ds), target), lambda));
        std::lock_guard lock(importance_mutex_);
        importance_cache_.try_emplace(key, body);
        return HttpResponse{200, body};
    });
}

void Service::mount(httplib::Server& server) {
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/api/datasets", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, list_datasets());
    });
    server.Post("/api/datasets", [this, send](const httplib::Request& req, httplib::Response& res) {
        if (req.is_multipart_form_data()) {
            if (req.files.empty()) return send(res, error_response(Error(ErrorKind::InvalidArgument, "no file in upload")));
            return send(res, upload(req.files.begin()->second.content));
        }
        send(res, upload(req.body));
    });
    server.Get(R"(/api/datasets/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, describe(req.matches[1]));
    });
    server.Get(R"(/api/datasets/([^/]+)/histogram)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, histogram(req.matches[1], req.get_param_value("feature"), req.get_param_value("bins")));
    });
    server.Get(R"(/api/datasets/([^/]+)/normalized)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, normalized(req.matches[1], req.get_param_value("feature")));
    });
    server.Get(R"(/api/datasets/([^/]+)/importance)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, importance(req.matches[1], req.get_param_value("target"), req.get_param_value("lambda")));
    });
    server.Post(R"(/api/datasets/([^/]+)/cluster)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, cluster(req.matches[1], req.body));
    });
    server.Post(R"(/api/datasets/([^/]+)/similarity)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, similarity(req.matches[1], req.body));
    });
}

}  // namespace cif
