#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dirpg/analysis.hpp"
#include "dirpg/baselines.hpp"
#include "dirpg/dirpg.hpp"
#include "dirpg/envs/deep_sea.hpp"
#include "dirpg/envs/multi_room_grid.hpp"
#include "dirpg/envs/sequence_env.hpp"
#include "dirpg/envs/spanning_tree_bandit.hpp"
#include "dirpg/errors.hpp"
#include "dirpg/experiment.hpp"
#include "dirpg/gumbel.hpp"

namespace py = pybind11;
using namespace dirpg;

namespace {

PriorityConfig make_priority(const std::string& mode, double alpha, bool prune) {
  PriorityConfig p;
  if (mode == "gumbel_only") {
    p.mode = PriorityMode::gumbel_only;
  } else if (mode == "direct_bound") {
    p.mode = PriorityMode::direct_bound;
  } else {
    throw std::invalid_argument("priority must be 'gumbel_only' or 'direct_bound'");
  }
  p.alpha = alpha;
  p.prune = prune;
  return p;
}

py::dict record_dict(const EpisodeRecord& r) {
  py::dict d;
  d["episode"] = r.episode;
  d["interactions"] = r.interactions;
  d["return_opt"] = r.return_opt;
  d["d_opt"] = r.d_opt;
  d["d_dir"] = r.d_dir;
  d["search_steps"] = r.search_steps;
  d["improved"] = r.improved;
  return d;
}

py::tuple train_result(const TrainResult& r) {
  py::list records;
  for (const auto& rec : r.records) records.append(record_dict(rec));
  return py::make_tuple(r.params, records);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Direct policy gradient with lazy Gumbel search";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("name", &Environment::name)
      .def_property_readonly("num_actions", &Environment::num_actions)
      .def_property_readonly("feature_dim", &Environment::feature_dim)
      .def_property_readonly("horizon", &Environment::horizon);

  py::class_<DeepSea, Environment>(m, "DeepSea").def(py::init<int>(), py::arg("size") = 5);

  py::class_<SequenceEnvironment, Environment>(m, "SequenceEnvironment")
      .def(py::init<std::size_t, std::size_t, std::vector<double>, double>(), py::arg("num_actions"),
           py::arg("horizon"), py::arg("rewards"), py::arg("reward_noise_sd") = 0.0)
      .def("code_of", [](const SequenceEnvironment& e, const Prefix& t) { return e.code_of(t); })
      .def("trajectory_of", &SequenceEnvironment::trajectory_of);

  py::class_<MultiRoomGrid, Environment>(m, "MultiRoomGrid")
      .def(py::init([](int width, int rooms, int horizon, std::uint64_t layout_seed, double door_reward,
                       double goal_reward) {
             return MultiRoomGrid(MultiRoomConfig{width, rooms, horizon, layout_seed, door_reward, goal_reward});
           }),
           py::arg("width") = 25, py::arg("rooms") = 6, py::arg("horizon") = 100, py::arg("layout_seed") = 0,
           py::arg("door_reward") = 0.5, py::arg("goal_reward") = 1.0)
      .def("dump", py::overload_cast<>(&MultiRoomGrid::dump, py::const_));

  py::class_<Edge>(m, "Edge")
      .def(py::init<int, int, double>(), py::arg("u"), py::arg("v"), py::arg("mu"))
      .def_readwrite("u", &Edge::u)
      .def_readwrite("v", &Edge::v)
      .def_readwrite("mu", &Edge::mu);
  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, std::vector<Edge> edges) { return Graph{n, std::move(edges)}; }),
           py::arg("num_vertices"), py::arg("edges"))
      .def_readonly("num_vertices", &Graph::num_vertices)
      .def_readonly("edges", &Graph::edges)
      .def("connected", &Graph::connected);
  m.def("random_graph", &random_graph, py::arg("num_vertices"), py::arg("extra_edge_prob"), py::arg("seed"),
        py::arg("mu_lo") = 0.0, py::arg("mu_hi") = 1.0);
  m.def("max_spanning_tree", [](const Graph& g, const std::vector<double>& w) { return max_spanning_tree(g, w); });

  py::class_<SpanningTreeBandit, Environment>(m, "SpanningTreeBandit")
      .def(py::init([](Graph g, const std::string& legality) {
             if (legality != "count" && legality != "connectivity") {
               throw std::invalid_argument("legality must be 'count' or 'connectivity'");
             }
             return SpanningTreeBandit(std::move(g), legality == "count" ? LegalityRule::count
                                                                        : LegalityRule::connectivity);
           }),
           py::arg("graph"), py::arg("legality") = "count")
      .def_property_readonly("graph", &SpanningTreeBandit::graph);

  py::class_<PolicyParams>(m, "PolicyParams")
      .def(py::init<std::size_t, std::size_t>(), py::arg("num_actions"), py::arg("feature_dim"))
      .def_static("zeros_for", &PolicyParams::zeros_for)
      .def_readonly("num_actions", &PolicyParams::num_actions)
      .def_readonly("feature_dim", &PolicyParams::feature_dim)
      .def_property(
          "theta", [](const PolicyParams& p) { return p.theta; },
          [](PolicyParams& p, const std::vector<double>& v) {
            if (v.size() != p.theta.size()) throw std::invalid_argument("theta has the wrong length");
            p.theta = v;
          })
      .def("__len__", &PolicyParams::size);

  m.def("sample_gumbel", [](double location, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return sample_gumbel(location, rng);
  });
  m.def("truncated_gumbel_from_uniform", &truncated_gumbel_from_uniform, py::arg("location"), py::arg("bound"),
        py::arg("u"));

  m.def(
      "direct_gradient",
      [](const PolicyParams& params, const Environment& env, std::uint64_t seed, double epsilon,
         std::size_t budget, bool terminate_on_first_improvement, const std::string& priority, double alpha,
         bool prune, bool control_variate) {
        const auto seeds = episode_seeds(seed, 0);
        NoiseTree tree(env, seeds.noise);
        const auto est = direct_gradient(params, tree, seeds.gumbel, epsilon,
                                         SearchBudget{budget, terminate_on_first_improvement},
                                         make_priority(priority, alpha, prune), control_variate);
        py::dict d;
        d["grad"] = est.grad;
        d["t_opt"] = est.t_opt;
        d["t_dir"] = est.t_dir;
        d["improved"] = est.improved;
        d["d_opt"] = est.d_opt;
        d["d_dir"] = est.d_dir;
        d["return_opt"] = est.return_opt;
        d["return_dir"] = est.return_dir;
        d["interactions"] = est.interactions;
        d["search_interactions"] = est.search_interactions;
        return d;
      },
      py::arg("params"), py::arg("env"), py::arg("seed"), py::arg("epsilon"), py::arg("budget") = 100,
      py::arg("terminate_on_first_improvement") = false, py::arg("priority") = "gumbel_only",
      py::arg("alpha") = 0.0, py::arg("prune") = false, py::arg("control_variate") = true);

  m.def(
      "train_dirpg",
      [](const Environment& env, double epsilon, std::size_t episodes, std::uint64_t seed, double learning_rate,
         std::size_t budget, bool terminate_on_first_improvement, const std::string& priority, double alpha,
         const std::optional<PolicyParams>& init) {
        DirpgSettings s;
        s.epsilon = epsilon;
        s.episodes = episodes;
        s.learning_rate = learning_rate;
        s.budget = SearchBudget{budget, terminate_on_first_improvement};
        s.priority = make_priority(priority, alpha, false);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train_dirpg(env, init.value_or(PolicyParams::zeros_for(env)), s, seed);
        }
        return train_result(r);
      },
      py::arg("env"), py::arg("epsilon"), py::arg("episodes"), py::arg("seed") = 0,
      py::arg("learning_rate") = 0.001, py::arg("budget") = 100, py::arg("terminate_on_first_improvement") = false,
      py::arg("priority") = "gumbel_only", py::arg("alpha") = 0.0, py::arg("init") = py::none(),
      "Returns (params, records); records are dicts with the CSV columns.");

  m.def(
      "run_ucb",
      [](const SpanningTreeBandit& env, const std::string& feedback, std::size_t episodes, std::uint64_t seed) {
        if (feedback != "semi" && feedback != "full") throw std::invalid_argument("feedback must be 'semi' or 'full'");
        return train_result(run_ucb(env, feedback == "semi" ? BanditFeedback::semi : BanditFeedback::full,
                                    episodes, seed));
      },
      py::arg("env"), py::arg("feedback"), py::arg("episodes"), py::arg("seed") = 0);

  m.def("exact_expected_return",
        [](const PolicyParams& p, const Environment& env, const std::vector<std::uint64_t>& seeds) {
          return exact_expected_return(p, env, seeds);
        },
        py::arg("params"), py::arg("env"), py::arg("noise_seeds") = std::vector<std::uint64_t>{0});
  m.def("exact_policy_gradient",
        [](const PolicyParams& p, const Environment& env, const std::vector<std::uint64_t>& seeds) {
          return exact_policy_gradient(p, env, seeds);
        },
        py::arg("params"), py::arg("env"), py::arg("noise_seeds") = std::vector<std::uint64_t>{0});

  m.def(
      "gauss_hermite",
      [](std::size_t n) {
        const auto rule = gauss_hermite(n);
        return py::make_tuple(rule.nodes, rule.weights);
      },
      py::arg("n"));
  m.def(
      "risk_objective",
      [](double p, double epsilon, std::size_t nodes, const std::string& model) {
        if (model != "controllable" && model != "joint") throw std::invalid_argument("model must be 'controllable' or 'joint'");
        return risk_objective_quadrature(p, epsilon, nodes,
                                         model == "joint" ? RiskModel::joint : RiskModel::controllable);
      },
      py::arg("p"), py::arg("epsilon"), py::arg("nodes") = 64, py::arg("model") = "controllable");
  m.def(
      "informative_gradient_probability",
      [](std::size_t a, std::size_t t, double eps, double m, std::size_t trials, std::uint64_t seed) {
        return to_json(informative_gradient_probability(a, t, eps, m, trials, seed)).dump();
      },
      py::arg("num_actions"), py::arg("horizon"), py::arg("epsilon"), py::arg("m"), py::arg("trials"),
      py::arg("seed") = 0, "JSON report with empirical, closed_form and standard_error.");

  m.def(
      "train_from_config",
      [](const std::string& path, std::uint64_t seed, std::optional<std::size_t> episodes) {
        auto cfg = load_config(path);
        if (episodes) cfg.episodes = *episodes;
        const auto env = make_environment(cfg.env, cfg.base_dir);
        return train_result(run_single(cfg, *env, seed));
      },
      py::arg("path"), py::arg("seed") = 0, py::arg("episodes") = py::none());
}
