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
#include <utility>
#include <vector>

#include "gazecluster/ingest.hpp"
#include "gazecluster/metrics.hpp"
#include "gazecluster/pipeline.hpp"

namespace httplib {
class Server;
}

namespace gazecluster {

struct ServiceConfig {
    std::size_t max_upload_bytes = 64u << 20;
    std::optional<std::filesystem::path> data_dir;
    AggregateRule aggregate = AggregateRule::Mean;
    ParseOptions parse;
    MatrixOptions matrix;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

/// Parsed dataset and its metric table; immutable after creation apart from
/// the cluster cache.
class Session {
public:
    struct CachedCluster {
        std::string response;     // POST /cluster body
        std::string layout_json;  // GET /matrix?key= body
    };

    Session(std::string id, Dataset dataset, AggregateResult aggregated);

    const std::string& id() const noexcept { return id_; }
    const Dataset& dataset() const noexcept { return dataset_; }
    const MetricTable& table() const noexcept { return table_; }
    const AggregateResult& aggregated() const noexcept { return aggregated_; }

    std::shared_ptr<const CachedCluster> find(const std::string& key) const;
    /// Inserts unless present; returns the stored entry.
    std::shared_ptr<const CachedCluster> insert(const std::string& key, CachedCluster entry);

    /// Input-order layout, computed once.
    const std::string& default_layout(const MatrixOptions& options) const;

private:
    std::string id_;
    Dataset dataset_;
    AggregateResult aggregated_;
    MetricTable table_;  // normalized
    mutable std::shared_mutex cache_mutex_;
    std::map<std::string, std::shared_ptr<const CachedCluster>, std::less<>> cache_;
    mutable std::once_flag default_once_;
    mutable std::string default_layout_;
};

/// Transport-independent request handlers for the analysis API.
class AnalysisService {
public:
    explicit AnalysisService(ServiceConfig config = {});

    /// POST /sessions[?axis=participant|stimulus]
    HttpResponse create_session(std::string_view csv, std::string_view axis = "participant");
    /// GET /sessions/{id}/metrics
    HttpResponse get_metrics(std::string_view session_id) const;
    /// POST /sessions/{id}/cluster with {"weights": {...}, "linkage", "k", "combine"}
    HttpResponse post_cluster(std::string_view session_id, std::string_view json_body);
    /// GET /sessions/{id}/matrix[?key=]; empty key = input order.
    HttpResponse get_matrix(std::string_view session_id, std::string_view key) const;
    /// GET /sessions/{id}/scanpaths/{entity}/{other}
    HttpResponse get_scanpath(std::string_view session_id, std::string_view entity,
                              std::string_view other) const;
    /// POST /sessions/{id}/filter with {"intervals": [{"axis", "lo", "hi"}, ...],
    /// "scale": "raw"|"normalized", "weights": {...}}; weights add a W-Avg axis.
    HttpResponse post_filter(std::string_view session_id, std::string_view json_body) const;
    /// GET /sessions/{id}/correlations
    HttpResponse get_correlations(std::string_view session_id) const;

    /// Reloads <data_dir>/*.csv sessions. Returns the number loaded.
    std::size_t load_persisted();

    const ServiceConfig& config() const noexcept { return config_; }
    std::size_t session_count() const;

private:
    std::shared_ptr<Session> session(std::string_view id) const;
    HttpResponse create_with_id(std::string id, std::string_view csv, EntityAxis axis, bool persist);

    ServiceConfig config_;
    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
    std::size_t next_id_ = 1;
};

/// JSON error body {code, message, detail}.
HttpResponse error_response(int status, std::string_view message, std::string_view detail_json = "null");

/// Stable short key for a canonical cluster request string.
std::string cluster_key(std::string_view canonical);

/// Registers all routes on an httplib server.
void bind_routes(httplib::Server& server, AnalysisService& service);

}  // namespace gazecluster
