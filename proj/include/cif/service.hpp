#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "cif/dataset.hpp"
#include "cif/error.hpp"
#include "cif/pairgrid.hpp"

namespace httplib {
class Server;
}

namespace cif {

struct ServiceConfig {
    std::optional<std::filesystem::path> cache_dir;
    std::optional<std::filesystem::path> default_dataset;
    std::size_t threads = 1;
};

struct HttpResponse {
    int status = 200;
    std::string body;  // canonical JSON
};

// The HTTP API minus the transport: each handler takes already-extracted
// request parts and returns a status plus canonical JSON, so the handlers
// can be exercised without sockets. mount() wires them into a server.
class Service {
public:
    // Loads the default dataset when configured; throws on failure.
    explicit Service(ServiceConfig config);

    const std::optional<std::string>& default_dataset_id() const { return default_id_; }

    HttpResponse list_datasets() const;
    HttpResponse upload(std::string_view csv);
    HttpResponse describe(const std::string& id) const;
    HttpResponse histogram(const std::string& id, const std::string& feature, const std::string& bins);
    HttpResponse normalized(const std::string& id, const std::string& feature);
    HttpResponse cluster(const std::string& id, std::string_view body);
    HttpResponse similarity(const std::string& id, std::string_view body);
    HttpResponse importance(const std::string& id, const std::string& target, const std::string& lambda);

    void mount(httplib::Server& server);

    GridCache& cache() { return cache_; }

private:
    std::shared_ptr<const Dataset> lookup(const std::string& id) const;
    std::string register_dataset(Dataset dataset);

    ServiceConfig config_;
    GridCache cache_;
    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
    std::mutex importance_mutex_;
    std::map<std::string, std::string> importance_cache_;
    std::optional<std::string> default_id_;
};

// Maps an exception to a status and canonical error body.
HttpResponse error_response(const std::exception& e);
int http_status(ErrorKind kind);

}  // namespace cif
