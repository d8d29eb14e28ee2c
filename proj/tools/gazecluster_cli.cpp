// Batch driver: metrics tables, seriated similarity matrices, synthetic
// fixtures and the HTTP service.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include "gazecluster/ingest.hpp"
#include "gazecluster/kernels.hpp"
#include "gazecluster/layout.hpp"
#include "gazecluster/metrics.hpp"
#include "gazecluster/pipeline.hpp"
#include "gazecluster/service.hpp"
#include "gazecluster/synth.hpp"

namespace gc = gazecluster;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(fmt::format("cannot read '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

void print_issues(const gc::ValidationReport& report) {
    for (const auto& e : report.errors) std::cerr << fmt::format("error: row {}: {}\n", e.row, e.message);
    for (const auto& w : report.warnings) std::cerr << fmt::format("warning: row {}: {}\n", w.row, w.message);
}

struct LoadOptions {
    std::string input;
    std::string sidecar;
    std::string aggregate = "mean";
    std::string k_basis = "scanpath";
    std::string axis = "participant";
    bool strict = false;
};

void add_load_options(CLI::App* cmd, LoadOptions& o) {
    cmd->add_option("--input,-i", o.input, "Fixation CSV")->required();
    cmd->add_option("--sidecar", o.sidecar, "Trial-duration sidecar CSV");
    cmd->add_option("--aggregate", o.aggregate, "Aggregation across scanpaths")
        ->check(CLI::IsMember({"mean", "median"}));
    cmd->add_option("--k-basis", o.k_basis, "Standardization basis for KCoef")
        ->check(CLI::IsMember({"scanpath", "dataset"}));
    cmd->add_option("--axis", o.axis, "Grouped variable")->check(CLI::IsMember({"participant", "stimulus"}));
    cmd->add_flag("--strict", o.strict, "Reject out-of-order or overlapping fixations");
}

gc::MetricTable load_table(const LoadOptions& o) {
    auto parsed = gc::parse_fixation_csv(read_file(o.input), {o.strict});
    print_issues(parsed.report);
    if (!parsed.report.accepted()) throw UsageError(fmt::format("'{}' failed validation", o.input));
    auto dataset = *parsed.dataset;
    if (!o.sidecar.empty()) {
        gc::ValidationReport sidecar_report;
        dataset = gc::apply_trial_sidecar(dataset, read_file(o.sidecar), sidecar_report);
        print_issues(sidecar_report);
        if (!sidecar_report.accepted()) throw UsageError(fmt::format("'{}' failed validation", o.sidecar));
    }
    dataset = gc::pivot_entities(dataset, *gc::parse_entity_axis(o.axis));
    auto aggregated = gc::aggregate(
        dataset, gc::AggregateOptions{*gc::parse_aggregate_rule(o.aggregate), *gc::parse_k_basis(o.k_basis)});
    for (const auto& w : aggregated.warnings) std::cerr << "warning: " << w << '\n';
    if (aggregated.table.size() < 2) throw UsageError("need at least 2 entities with complete metrics");
    return gc::normalize(std::move(aggregated.table));
}

gc::WeightVector parse_weights(const std::string& spec) {
    try {
        return gc::WeightVector::parse(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(fmt::format("--weights: {}", e.what()));
    }
}

int serve(int port, const std::string& host, const std::string& data_dir, const gc::MatrixOptions& matrix) {
    // Block termination signals in every thread; a dedicated thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGINT);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    gc::ServiceConfig config;
    config.matrix = matrix;
    if (!data_dir.empty()) config.data_dir = data_dir;
    gc::AnalysisService service(config);
    if (const auto loaded = service.load_persisted(); loaded > 0)
        std::cerr << fmt::format("restored {} session(s) from {}\n", loaded, data_dir);

    httplib::Server server;
    gc::bind_routes(server, service);
    // no SO_REUSEPORT: a second instance must fail to bind
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    if (!server.bind_to_port(host, port)) {
        std::cerr << fmt::format("error: cannot bind {}:{}\n", host, port);
        return kRuntimeError;
    }
    std::thread waiter([&server, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    waiter.detach();
    std::cerr << fmt::format("listening on http://{}:{}\n", host, port);
    const bool ok = server.listen_after_bind();
    std::cerr << "shutting down\n";
    return ok ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group eye-tracking participants by weighted gaze metrics"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

    // metrics
    LoadOptions metrics_load;
    std::string metrics_output = "-";
    std::string metrics_weights;
    bool metrics_normalized = false, metrics_masks = false, metrics_json = false;
    auto* metrics = app.add_subcommand("metrics", "Compute the per-entity metric table");
    add_load_options(metrics, metrics_load);
    metrics->add_option("--output,-o", metrics_output, "Output path ('-' for stdout)");
    metrics->add_option("--weights", metrics_weights, "Append W-Avg for Metric=weight,...");
    metrics->add_flag("--normalized", metrics_normalized, "Write min-max normalized values");
    metrics->add_flag("--masks", metrics_masks, "Append <Metric>_n scanpath support columns");
    metrics->add_flag("--json", metrics_json, "Write JSON instead of CSV");

    // matrix
    LoadOptions matrix_load;
    std::string matrix_output, matrix_weights, matrix_linkage = "average", matrix_combine = "sum",
                matrix_layout_json;
    std::size_t matrix_k = 0, matrix_pixels = 16;
    bool invert_lightness = false;
    double chroma = gc::MatrixOptions{}.chroma;
    auto* matrix = app.add_subcommand("matrix", "Render the seriated similarity matrix as SVG");
    add_load_options(matrix, matrix_load);
    matrix->add_option("--output,-o", matrix_output, "SVG output path")->required();
    matrix->add_option("--weights", matrix_weights, "Metric=weight,... summing to 1")->required();
    matrix->add_option("--linkage", matrix_linkage)->check(CLI::IsMember({"single", "complete", "average"}));
    matrix->add_option("--combine", matrix_combine)->check(CLI::IsMember({"sum", "euclidean"}));
    matrix->add_option("--k", matrix_k, "Clusters to outline (0 = none)");
    matrix->add_option("--pixel-size", matrix_pixels, "Pixels per entity cell");
    matrix->add_option("--chroma", chroma, "CIELAB chroma of metric hues");
    matrix->add_option("--layout-json", matrix_layout_json, "Also write the layout JSON");
    matrix->add_flag("--invert-lightness", invert_lightness, "Darkest cells for identical entities");

    // synth
    std::uint64_t seed = 1;
    std::string groups = gc::default_group_spec(), synth_output = "-", synth_labels;
    std::size_t stimuli = 48;
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic fixation CSV");
    synth->add_option("--seed", seed);
    synth->add_option("--groups", groups, "name=A,n=20,fix=lo:hi,sac=lo:hi,fixations=lo:hi;...");
    synth->add_option("--stimuli", stimuli)->check(CLI::PositiveNumber);
    synth->add_option("--output,-o", synth_output, "Output path ('-' for stdout)");
    synth->add_option("--labels", synth_labels, "Write participant_id,group CSV");

    // serve
    int port = 8080;
    std::string host = "127.0.0.1", data_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP analysis service");
    serve_cmd->add_option("--port", port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--data", data_dir, "Directory for persisted sessions");
    serve_cmd->add_flag("--invert-lightness", invert_lightness);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }
    if (threads > 0) gc::kernels::set_threads(threads);

    try {
        if (*metrics) {
            auto table = load_table(metrics_load);
            if (!metrics_weights.empty())
                table = gc::with_derived(table, "W-Avg", gc::merge_metrics(table, parse_weights(metrics_weights)));
            write_output(metrics_output,
                         metrics_json ? gc::metric_table_json(table) + "\n"
                                      : gc::metric_table_csv(table, {metrics_normalized, metrics_masks}));
        } else if (*matrix) {
            const auto weights = parse_weights(matrix_weights);
            const auto table = load_table(matrix_load);
            if (matrix_k > table.size())
                throw UsageError(fmt::format("--k must be at most {}", table.size()));
            gc::ClusterRequest request{weights, *gc::parse_linkage(matrix_linkage),
                                       matrix_k > 0 ? std::optional(matrix_k) : std::nullopt,
                                       *gc::parse_combine_form(matrix_combine)};
            const auto result = gc::run_clustering(table, request);
            gc::MatrixOptions options;
            options.chroma = chroma;
            options.invert_lightness = invert_lightness;
            const auto layout = gc::build_dssm(table, result.leaf_order, result.boundaries, options);
            gc::SvgOptions svg;
            svg.pixel_size = matrix_pixels;
            if (svg.pixel_size < layout.side())
                throw UsageError(fmt::format("--pixel-size must be at least {}", layout.side()));
            write_output(matrix_output, gc::render_svg(layout, svg));
            if (!matrix_layout_json.empty()) write_output(matrix_layout_json, gc::layout_json(layout) + "\n");
        } else if (*synth) {
            gc::SynthSpec spec;
            try {
                spec.groups = gc::parse_group_spec(groups);
            } catch (const std::invalid_argument& e) {
                throw UsageError(fmt::format("--groups: {}", e.what()));
            }
            spec.stimuli = stimuli;
            const auto out = gc::synthesize(spec, seed);
            write_output(synth_output, gc::serialize_fixation_csv(out.dataset));
            if (!synth_labels.empty()) {
                std::string labels = "participant_id,group\n";
                const auto& ids = out.dataset.participants();
                for (std::size_t i = 0; i < ids.size(); ++i)
                    labels += fmt::format("{},{}\n", ids[i], spec.groups[out.group_of_participant[i]].name);
                write_output(synth_labels, labels);
            }
        } else if (*serve_cmd) {
            gc::MatrixOptions options;
            options.invert_lightness = invert_lightness;
            return serve(port, host, data_dir, options);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
