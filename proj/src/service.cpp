#include "gazecluster/service.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "gazecluster/clustering.hpp"
#include "gazecluster/layout.hpp"
#include "gazecluster/similarity.hpp"

namespace gazecluster {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) {
    return {status, "application/json", body.dump(), {}};
}

json issues_json(const std::vector<Issue>& issues) {
    json arr = json::array();
    for (const auto& i : issues) arr.push_back({{"row", i.row}, {"message", i.message}});
    return arr;
}

std::string canonical_request(const ClusterRequest& r) {
    return fmt::format("{}|{}|{}|{}", r.weights.canonical_key(), to_string(r.linkage), to_string(r.form),
                       r.k ? fmt::format("{}", *r.k) : std::string("-"));
}

WeightVector weights_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("weights must be an object of Metric: weight");
    std::array<double, kMetricCount> w{};
    for (const auto& [name, value] : j.items()) {
        auto metric = parse_metric(name);
        if (!metric) throw std::invalid_argument(fmt::format("unknown metric '{}'", name));
        if (!value.is_number()) throw std::invalid_argument(fmt::format("weight for {} is not a number", name));
        w[index_of(*metric)] = value.get<double>();
    }
    WeightVector weights(w);
    weights.validate();
    return weights;
}

}  // namespace

HttpResponse error_response(int status, std::string_view message, std::string_view detail_json) {
    json body;
    body["code"] = status;
    body["message"] = message;
    body["detail"] = json::parse(detail_json);
    return json_response(status, body);
}

std::string cluster_key(std::string_view canonical) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", hash);
}

namespace {

// A lone entity is a constant column everywhere.
MetricTable session_table(const MetricTable& raw) {
    if (raw.size() >= 2) return normalize(raw);
    MetricTable t = raw;
    t.normalized = Matrix(raw.size(), kMetricCount, 0.5);
    return t;
}

}  // namespace

Session::Session(std::string id, Dataset dataset, AggregateResult aggregated)
    : id_(std::move(id)), dataset_(std::move(dataset)), aggregated_(std::move(aggregated)),
      table_(session_table(aggregated_.table)) {}

std::shared_ptr<const Session::CachedCluster> Session::find(const std::string& key) const {
    std::shared_lock lock(cache_mutex_);
    auto it = cache_.find(key);
    return it == cache_.end() ? nullptr : it->second;
}

std::shared_ptr<const Session::CachedCluster> Session::insert(const std::string& key, CachedCluster entry) {
    std::unique_lock lock(cache_mutex_);
    auto [it, inserted] = cache_.try_emplace(key, std::make_shared<const CachedCluster>(std::move(entry)));
    return it->second;
}

const std::string& Session::default_layout(const MatrixOptions& options) const {
    std::call_once(default_once_, [&] {
        std::vector<std::size_t> order(table_.size());
        std::iota(order.begin(), order.end(), 0);
        default_layout_ = layout_json(build_dssm(table_, order, {}, options));
    });
    return default_layout_;
}

AnalysisService::AnalysisService(ServiceConfig config) : config_(std::move(config)) {}

std::size_t AnalysisService::session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
}

std::shared_ptr<Session> AnalysisService::session(std::string_view id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

HttpResponse AnalysisService::create_session(std::string_view csv, std::string_view axis_name) {
    if (csv.size() > config_.max_upload_bytes)
        return error_response(413, "upload too large",
                              json({{"limit_bytes", config_.max_upload_bytes}}).dump());
    auto axis = parse_entity_axis(axis_name.empty() ? "participant" : axis_name);
    if (!axis) return error_response(400, "axis must be participant or stimulus");
    std::string id;
    {
        std::unique_lock lock(sessions_mutex_);
        id = fmt::format("s{}", next_id_++);
    }
    return create_with_id(std::move(id), csv, *axis, true);
}

HttpResponse AnalysisService::create_with_id(std::string id, std::string_view csv, EntityAxis axis,
                                             bool persist) {
    auto parsed = parse_fixation_csv(csv, config_.parse);
    if (!parsed.report.accepted()) {
        json detail{{"errors", issues_json(parsed.report.errors)},
                    {"warnings", issues_json(parsed.report.warnings)}};
        return error_response(400, "validation failed", detail.dump());
    }
    auto dataset = pivot_entities(*parsed.dataset, axis);
    auto aggregated = aggregate(dataset, config_.aggregate);
    if (aggregated.table.size() == 0) {
        json detail{{"dropped", aggregated.dropped}, {"warnings", aggregated.warnings}};
        return error_response(400, "no entity has complete metrics", detail.dump());
    }

    auto s = std::make_shared<Session>(id, std::move(dataset), std::move(aggregated));
    if (persist && config_.data_dir) {
        std::filesystem::create_directories(*config_.data_dir);
        std::ofstream(*config_.data_dir / (id + ".csv"), std::ios::binary) << csv;
        std::ofstream(*config_.data_dir / (id + ".axis")) << to_string(axis);
        std::ofstream(*config_.data_dir / (id + ".layout.json"), std::ios::binary)
            << s->default_layout(config_.matrix);
    }

    json body;
    body["session_id"] = id;
    body["axis"] = to_string(axis);
    body["entities"] = s->table().size();
    body["participants"] = s->dataset().participants().size();
    body["stimuli"] = s->dataset().stimuli().size();
    body["fixations"] = parsed.report.fixation_count;
    body["warnings"] = issues_json(parsed.report.warnings);
    body["dropped"] = s->aggregated().dropped;
    {
        std::unique_lock lock(sessions_mutex_);
        sessions_[id] = std::move(s);
    }
    auto response = json_response(201, body);
    response.headers.emplace_back("Location", "/sessions/" + id);
    return response;
}

std::size_t AnalysisService::load_persisted() {
    if (!config_.data_dir || !std::filesystem::exists(*config_.data_dir)) return 0;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*config_.data_dir))
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::size_t loaded = 0;
    for (const auto& file : files) {
        const auto id = file.stem().string();
        std::ifstream in(file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string axis_name = "participant";
        std::ifstream(file.parent_path() / (id + ".axis")) >> axis_name;
        auto axis = parse_entity_axis(axis_name).value_or(EntityAxis::Participant);
        if (create_with_id(id, buf.str(), axis, false).status == 201) {
            ++loaded;
            if (id.size() > 1 && id[0] == 's') {
                std::size_t n = 0;
                if (std::from_chars(id.data() + 1, id.data() + id.size(), n).ec == std::errc{}) {
                    std::unique_lock lock(sessions_mutex_);
                    next_id_ = std::max(next_id_, n + 1);
                }
            }
        }
    }
    return loaded;
}

HttpResponse AnalysisService::get_metrics(std::string_view session_id) const {
    auto s = session(session_id);
    if (!s) return error_response(404, "unknown session");
    return {200, "application/json", metric_table_json(s->table()), {}};
}

HttpResponse AnalysisService::post_cluster(std::string_view session_id, std::string_view body) {
    auto s = session(session_id);
    if (!s) return error_response(404, "unknown session");

    json request_json = json::parse(body, nullptr, false);
    if (request_json.is_discarded() || !request_json.is_object())
        return error_response(400, "request body must be a JSON object");

    ClusterRequest request;
    try {
        request.weights = weights_from_json(request_json.value("weights", json::object()));
        if (auto it = request_json.find("linkage"); it != request_json.end()) {
            auto l = it->is_string() ? parse_linkage(it->get<std::string>()) : std::nullopt;
            if (!l) throw std::invalid_argument("linkage must be single, complete or average");
            request.linkage = *l;
        }
        if (auto it = request_json.find("combine"); it != request_json.end()) {
            auto f = it->is_string() ? parse_combine_form(it->get<std::string>()) : std::nullopt;
            if (!f) throw std::invalid_argument("combine must be sum or euclidean");
            request.form = *f;
        }
        if (auto it = request_json.find("k"); it != request_json.end() && !it->is_null()) {
            if (!it->is_number_integer() || it->get<long long>() < 1 ||
                static_cast<std::size_t>(it->get<long long>()) > s->table().size())
                throw std::invalid_argument(
                    fmt::format("k must be an integer in [1, {}]", s->table().size()));
            request.k = static_cast<std::size_t>(it->get<long long>());
        }
    } catch (const std::invalid_argument& e) {
        return error_response(422, e.what());
    }

    const auto canonical = canonical_request(request);
    const auto key = cluster_key(canonical);
    if (auto hit = s->find(key)) {
        HttpResponse r{200, "application/json", hit->response, {{"X-Cache", "hit"}}};
        return r;
    }

    const auto& table = s->table();
    if (table.size() < 2) return error_response(422, "clustering needs at least 2 entities");
    const auto result = run_clustering(table, request);

    json out;
    out["key"] = key;
    out["request"] = canonical;
    out["weights"] = json::object();
    for (auto m : request.weights.selected())
        out["weights"][std::string(metric_name(m))] = request.weights[m];
    out["linkage"] = to_string(request.linkage);
    out["combine"] = to_string(request.form);
    out["k"] = request.k ? json(*request.k) : json(nullptr);
    out["entities"] = table.entities;
    json merges = json::array();
    for (const auto& m : result.dendrogram.merges) merges.push_back({m.left, m.right, m.height, m.size});
    out["merges"] = std::move(merges);
    out["leaf_indices"] = result.leaf_order;
    std::vector<std::string> leaf_ids;
    for (auto i : result.leaf_order) leaf_ids.push_back(table.entities[i]);
    out["leaf_order"] = leaf_ids;
    out["labels"] = result.labels ? json(result.labels->labels) : json(nullptr);
    out["group_boundaries"] = result.boundaries;
    out["w_avg"] = result.w_avg;

    Session::CachedCluster entry;
    entry.response = out.dump();
    entry.layout_json = layout_json(build_dssm(table, result.leaf_order, result.boundaries, config_.matrix));
    auto stored = s->insert(key, std::move(entry));
    HttpResponse r{200, "application/json", stored->response, {{"X-Cache", "miss"}}};
    return r;
}

HttpResponse AnalysisService::post_filter(std::string_view session_id, std::string_view body) const {
    auto s = session(session_id);
    if (!s) return error_response(404, "unknown session");

    json request_json = json::parse(body, nullptr, false);
    if (request_json.is_discarded() || !request_json.is_object())
        return error_response(400, "request body must be a JSON object");

    try {
        MetricTable table = s->table();
        if (auto it = request_json.find("weights"); it != request_json.end())
            table = with_derived(std::move(table), "W-Avg", merge_metrics(table, weights_from_json(*it)));

        bool normalized = false;
        if (auto it = request_json.find("scale"); it != request_json.end()) {
            if (*it != "raw" && *it != "normalized") throw std::invalid_argument("scale must be raw or normalized");
            normalized = *it == "normalized";
        }

        std::vector<AxisInterval> intervals;
        const auto list = request_json.value("intervals", json::array());
        if (!list.is_array()) throw std::invalid_argument("intervals must be an array");
        for (const auto& iv : list) {
            if (!iv.is_object() || !iv.contains("axis") || !iv["axis"].is_string() ||
                !iv.value("lo", json()).is_number() || !iv.value("hi", json()).is_number())
                throw std::invalid_argument("each interval needs axis, lo and hi");
            intervals.push_back({iv["axis"].get<std::string>(), iv["lo"].get<double>(), iv["hi"].get<double>()});
        }

        const auto rows = filter_entities(table, intervals, normalized);
        std::vector<std::string> ids;
        for (auto r : rows) ids.push_back(table.entities[r]);
        return json_response(200, json{{"indices", rows}, {"entities", ids}});
    } catch (const std::invalid_argument& e) {
        return error_response(422, e.what());
    }
}

HttpResponse AnalysisService::get_matrix(std::string_view session_id, std::string_view key) const {
    auto s = session(session_id);
    if (!s) return error_response(404, "unknown session");
    if (key.empty()) return {200, "application/json", s->default_layout(config_.matrix), {}};
    auto hit = s->find(std::string(key));
    if (!hit) return error_response(404, "unknown cluster key", json(std::string(key)).dump());
    return {200, "application/json", hit->layout_json, {}};
}

HttpResponse AnalysisService::get_scanpath(std::string_view session_id, std::string_view entity,
                                           std::string_view other) const {
    auto s = session(session_id);
    if (!s) return error_response(404, "unknown session");
    const auto& d = s->dataset();
    const Scanpath* path = d.entity_axis() == EntityAxis::Participant ? d.find(entity, other)
                                                                       : d.find(other, entity);
    if (!path) return error_response(404, "unknown scanpath");
    json fixations = json::array();
    for (const auto& f : path->fixations)
        fixations.push_back({{"x", f.x}, {"y", f.y}, {"onset_ms", f.onset}, {"duration_ms", f.duration}});
    json body{{"participant_id", path->participant_id},
              {"stimulus_id", path->stimulus_id},
              {"fixations", std::move(fixations)}};
    return json_response(200, body);
}

HttpResponse AnalysisService::get_correlations(std::string_view session_id) const {
    auto s = session(session_id);
    if (!s) return error_response(404, "unknown session");
    if (s->table().size() < 3) return error_response(422, "correlations need at least 3 entities");
    const auto corr = metric_correlations(s->table());
    const auto dg = cluster_metrics(corr, config_.matrix.metric_distance);
    json values = json::array();
    for (std::size_t a = 0; a < corr.metrics.size(); ++a) {
        auto row = corr.values.row(a);
        values.push_back(std::vector<double>(row.begin(), row.end()));
    }
    std::vector<std::string> names, leaves;
    for (auto m : corr.metrics) names.emplace_back(metric_name(m));
    for (auto leaf : leaf_order(dg)) leaves.emplace_back(metric_name(corr.metrics[leaf]));
    json body{{"metrics", names},
              {"values", std::move(values)},
              {"dendrogram", json::parse(dendrogram_json(dg))},
              {"leaf_order", leaves},
              {"warnings", corr.warnings}};
    return json_response(200, body);
}

void bind_routes(httplib::Server& server, AnalysisService& service) {
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        for (const auto& [k, v] : r.headers) res.set_header(k, v);
        res.set_content(r.body, r.content_type);
    };
    auto guarded = [send](auto handler) {
        return [send, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                send(res, handler(req));
            } catch (const std::exception& e) {
                send(res, error_response(500, "internal error", json(std::string(e.what())).dump()));
            }
        };
    };

    server.set_payload_max_length(service.config().max_upload_bytes);
    server.Post("/sessions", guarded([&service](const httplib::Request& req) {
                    return service.create_session(req.body, req.get_param_value("axis"));
                }));
    server.Get(R"(/sessions/([^/]+)/metrics)", guarded([&service](const httplib::Request& req) {
                   return service.get_metrics(req.matches[1].str());
               }));
    server.Post(R"(/sessions/([^/]+)/cluster)", guarded([&service](const httplib::Request& req) {
                    return service.post_cluster(req.matches[1].str(), req.body);
                }));
    server.Post(R"(/sessions/([^/]+)/filter)", guarded([&service](const httplib::Request& req) {
                    return service.post_filter(req.matches[1].str(), req.body);
                }));
    server.Get(R"(/sessions/([^/]+)/matrix)", guarded([&service](const httplib::Request& req) {
                   return service.get_matrix(req.matches[1].str(), req.get_param_value("key"));
               }));
    server.Get(R"(/sessions/([^/]+)/scanpaths/([^/]+)/([^/]+))",
               guarded([&service](const httplib::Request& req) {
                   return service.get_scanpath(req.matches[1].str(), req.matches[2].str(),
                                               req.matches[3].str());
               }));
    server.Get(R"(/sessions/([^/]+)/correlations)", guarded([&service](const httplib::Request& req) {
                   return service.get_correlations(req.matches[1].str());
               }));
    server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto message = res.status == 413 ? "upload too large" : httplib::status_message(res.status);
        send(res, error_response(res.status, message));
    });
}

}  // namespace gazecluster
