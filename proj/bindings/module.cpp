#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csales/bench.hpp"
#include "csales/catalog.hpp"
#include "csales/eval.hpp"
#include "csales/profiles.hpp"
#include "csales/retrieval.hpp"
#include "csales/run.hpp"

namespace py = pybind11;
using namespace csales;

namespace {

// python-friendly views over the line-delimited formats

std::vector<std::pair<std::string, double>> py_query_search(
    const std::vector<std::pair<std::string, std::string>>& corpus, const std::string& query,
    std::size_t k, std::size_t dim) {
    retrieval::HashEmbedder embedder(dim);
    std::vector<std::pair<std::string, retrieval::Vector>> entries;
    for (const auto& [id, text] : corpus) entries.emplace_back(id, embedder.embed(text));
    auto index = retrieval::VectorIndex::from_entries(std::move(entries));
    auto result = retrieval::query_search(index, embedder, query, k);
    std::vector<std::pair<std::string, double>> out;
    for (const auto& hit : result.hits) out.emplace_back(hit.item_id, hit.score);
    return out;
}

std::vector<std::tuple<std::string, std::string, int, std::int64_t>> py_k_core(
    const std::vector<std::tuple<std::string, std::string, int, std::int64_t>>& edges, int k) {
    std::vector<catalog::Interaction> interactions;
    for (const auto& [user, item, rating, ts] : edges) {
        catalog::Interaction in;
        in.user_id = user;
        in.item_id = item;
        in.rating = rating;
        in.timestamp = ts;
        interactions.push_back(std::move(in));
    }
    auto kept = catalog::k_core_filter(interactions, k);
    std::vector<std::tuple<std::string, std::string, int, std::int64_t>> out;
    for (const auto& in : kept)
        out.emplace_back(in.user_id, in.item_id, in.rating, in.timestamp);
    return out;
}

double py_sr(const std::vector<std::string>& outcomes) {
    std::vector<eval::Transcript> ts;
    for (const auto& o : outcomes) {
        eval::Transcript t;
        if (o == "in")
            t.outcome = eval::Outcome::AcceptedInBudget;
        else if (o == "out")
            t.outcome = eval::Outcome::AcceptedOutOfBudget;
        else if (o == "error")
            t.outcome = eval::Outcome::Errored;
        else
            t.outcome = eval::Outcome::NoPurchase;
        ts.push_back(std::move(t));
    }
    return eval::compute_sr(ts);
}

py::object py_swr(const std::vector<std::string>& outcomes) {
    std::vector<eval::Transcript> ts;
    for (const auto& o : outcomes) {
        eval::Transcript t;
        if (o == "in")
            t.outcome = eval::Outcome::AcceptedInBudget;
        else if (o == "out")
            t.outcome = eval::Outcome::AcceptedOutOfBudget;
        else if (o == "error")
            t.outcome = eval::Outcome::Errored;
        else
            t.outcome = eval::Outcome::NoPurchase;
        ts.push_back(std::move(t));
    }
    auto swr = eval::compute_swr(ts);
    if (!swr) return py::none();
    return py::float_(*swr);
}

std::pair<double, double> py_estimate_budget(const std::vector<double>& prices) {
    auto b = profiles::estimate_budget(prices);
    return {b.min, b.max};
}

py::dict py_run_eval(const std::string& config_path) {
    auto cfg = config::load_config(config_path);
    auto artifacts = run::run_eval(cfg);
    py::dict out;
    out["sr"] = artifacts.report.sr;
    out["swr"] = artifacts.report.swr ? py::object(py::float_(*artifacts.report.swr))
                                      : py::object(py::none());
    out["episodes"] = artifacts.report.episodes;
    out["errored"] = artifacts.report.errored;
    py::list files;
    for (const auto& f : artifacts.written_files) files.append(f);
    out["files"] = files;
    return out;
}

py::dict py_generate_benchmark(const std::string& out_dir, std::uint64_t seed) {
    bench::BenchSpec spec;
    spec.out_dir = out_dir;
    spec.seed = seed;
    auto artifacts = bench::generate_benchmark(spec);
    py::dict out;
    out["catalog"] = artifacts.catalog_path;
    out["profiles"] = artifacts.profiles_path;
    out["fixtures"] = artifacts.fixtures_path;
    out["memory"] = artifacts.memory_path;
    py::dict configs;
    for (const auto& [name, path] : artifacts.config_paths)
        configs[py::str(name)] = path;
    out["configs"] = configs;
    py::dict reports;
    for (const auto& [name, report] : artifacts.reports) {
        py::dict r;
        r["sr"] = report.sr;
        r["swr"] = report.swr ? py::object(py::float_(*report.swr))
                              : py::object(py::none());
        reports[py::str(name)] = r;
    }
    out["reports"] = reports;
    return out;
}

}  // namespace

PYBIND11_MODULE(_csales, m) {
    m.doc() = "Conversational sales laboratory core bindings";

    m.def("embed_text",
          [](const std::string& text, std::size_t dim) {
              return retrieval::HashEmbedder(dim).embed(text).values;
          },
          py::arg("text"), py::arg("dim") = 256,
          "Deterministic hash embedding of a text.");
    m.def("query_search", &py_query_search, py::arg("corpus"), py::arg("query"), py::arg("k"),
          py::arg("dim") = 256,
          "Exact nearest-neighbor search over (id, text) pairs; returns (id, score).");
    m.def("k_core_filter", &py_k_core, py::arg("edges"), py::arg("k"),
          "Iterative k-core filtering over (user, item, rating, timestamp) edges.");
    m.def("compute_sr", &py_sr, py::arg("outcomes"),
          "Success rate over outcome labels: in | out | no | error.");
    m.def("compute_swr", &py_swr, py::arg("outcomes"),
          "Out-of-budget share of acceptances, or None with no acceptances.");
    m.def("estimate_budget", &py_estimate_budget, py::arg("target_prices"),
          "Budget interval implied by target item prices.");
    m.def("partition_by_budget",
          [](const std::vector<std::pair<std::string, double>>& priced, double budget_max) {
              std::vector<std::string> in_budget;
              std::vector<std::string> out_of_budget;
              for (const auto& [id, price] : priced)
                  (price <= budget_max ? in_budget : out_of_budget).push_back(id);
              return std::make_pair(in_budget, out_of_budget);
          },
          py::arg("priced_items"), py::arg("budget_max"),
          "Splits (id, price) pairs by the budget ceiling, preserving order.");
    m.def("run_eval", &py_run_eval, py::arg("config_path"),
          "Runs a full evaluation from a config file; returns summary metrics.");
    m.def("generate_benchmark", &py_generate_benchmark, py::arg("out_dir"),
          py::arg("seed") = 42,
          "Builds the synthetic reference benchmark with recorded fixtures.");

    m.attr("__version__") = "0.1.0";
}
