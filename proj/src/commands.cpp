#include "relaxpath/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

#include "relaxpath/relaxpath.hpp"

namespace relaxpath::cli {

using io::JsonWriter;

TrackerKind parse_tracker(const std::string& name) {
  if (name == "local") return TrackerKind::Local;
  if (name == "sparse") return TrackerKind::Sparse;
  if (name == "uniform") return TrackerKind::Uniform;
  if (name == "global") return TrackerKind::Global;
  if (name == "auto") return TrackerKind::Auto;
  throw Error(Errc::InvalidArgument, "unknown tracker " + name);
}

Objective parse_objective(const std::string& name) {
  if (name == "entropy") return Objective::Entropy;
  if (name == "squared") return Objective::Squared;
  throw Error(Errc::InvalidArgument, "unknown objective " + name);
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::NonUniformPrior:
    case Errc::IncompatibleTracker: return 3;
    case Errc::ZeroPrimal: return 4;
    case Errc::ZeroProbability: return 5;
    default: return 2;
  }
}

RelaxationPath<double> compute_path(const ProblemInstance<double>& inst, TrackerKind tracker,
                                    Objective objective) {
  if (objective == Objective::Squared) {
    if (tracker != TrackerKind::Local && tracker != TrackerKind::Auto)
      throw Error(Errc::IncompatibleTracker, "the squared objective supports only the local tracker");
    return sq_track_local(inst);
  }
  if (tracker == TrackerKind::Auto) {
    const Index nnz = Index((inst.q().array() != 0).count());
    if (is_uniform_prior(inst))
      tracker = TrackerKind::Uniform;
    else if (8 * nnz <= inst.n())
      tracker = TrackerKind::Sparse;
    else
      tracker = TrackerKind::Local;
  }
  switch (tracker) {
    case TrackerKind::Sparse: return track_sparse(inst);
    case TrackerKind::Uniform: return track_uniform(inst);
    case TrackerKind::Global: return track_global(inst);
    default: return track_local(inst);
  }
}

std::string path_document(const PathOptions& opt) {
  const auto inst = io::make_instance(io::load_instance(opt.input));
  return io::path_to_json(compute_path(inst, opt.tracker, opt.objective));
}

std::string solve_document(const SolveOptions& opt) {
  const auto file = io::load_instance(opt.input);
  const auto inst = io::make_instance(file);
  if (!(opt.nu > 0) || !std::isfinite(opt.nu)) throw Error(Errc::InvalidNu, "--nu must be positive");
  JsonWriter w;
  w.begin_object();
  w.key("objective").value(to_string(opt.objective));
  w.key("nu").value(opt.nu);
  Eigen::VectorXd p;
  if (opt.objective == Objective::Entropy) {
    const auto pt = solve_point(inst, opt.nu);
    p = pt.p;
    w.key("mu").value(pt.mu);
    w.key("p").value(pt.p);
    w.key("alpha").value(pt.alpha);
    w.key("Z").value(pt.Z);
    w.key("eta").value(pt.eta);
    w.key("partition").value(pt.s);
  } else {
    const double mu = sq_solve_mu_at(inst, opt.nu);
    p = sq_primal_from(inst, opt.nu, mu);
    Eigen::VectorXi s(inst.n());
    const double band = Tolerances<double>{}.scaled_geom(opt.nu);
    for (Index j = 0; j < inst.n(); ++j) {
      const double v = opt.nu * (inst.u()[j] - inst.q()[j]) + mu;
      s[j] = v >= 1 - band ? 1 : (v <= -1 + band ? -1 : 0);
    }
    w.key("mu").value(mu);
    w.key("p").value(p);
    w.key("partition").value(s);
  }
  if (file.delta) w.key("p_original").value(Eigen::VectorXd(p.cwiseProduct(*file.delta)));
  w.end_object();
  return w.str();
}

std::string select_document(const SelectOptions& opt) {
  const auto file = io::load_instance(opt.input);
  if (!file.r) throw Error(Errc::InvalidInstance, "the instance file has no \"r\" counts");
  const auto inst = io::make_instance(file);
  const auto path = opt.path.empty() ? compute_path(inst, opt.tracker, Objective::Entropy)
                                     : io::path_from_json(io::read_file(opt.path));
  if (path.objective != Objective::Entropy || path.n != inst.n())
    throw Error(Errc::InvalidInstance, "the path file does not belong to this instance");
  const auto table = select_models(inst, path, *file.r, opt.lambda_min);
  JsonWriter w;
  w.begin_object();
  w.key("lambda_min").value(opt.lambda_min);
  w.key("row0_moved").value(table.row0_moved);
  w.key("rows").begin_array();
  for (const auto& row : table.rows)
    w.begin_object()
        .key("support")
        .value(static_cast<long long>(row.support))
        .key("nu_star")
        .value(row.nu_star)
        .key("loss_star")
        .value(row.loss_star)
        .key("open_infimum")
        .value(row.open_infimum)
        .end_object();
  w.end_array();
  w.end_object();
  return w.str();
}

std::string cascade_document(const CascadeOptions& opt) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(io::read_file(opt.input));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInstance, std::string("malformed JSON: ") + e.what());
  }
  auto vec = [](const json& a) {
    Eigen::VectorXd v(Eigen::Index(a.size()));
    for (std::size_t j = 0; j < a.size(); ++j) v[Eigen::Index(j)] = a[j].get<double>();
    return v;
  };
  std::vector<CascadeStage<double>> stages;
  Eigen::VectorXd u, m, p;
  try {
    u = vec(doc.at("u"));
    m = doc.contains("m") ? vec(doc.at("m")) : Eigen::VectorXd::Ones(u.size());
    p = u;
    for (const auto& st : doc.at("stages")) {
      auto res = cascade_step<double>(p, vec(st.at("q")), m, st.at("nu").get<double>());
      p = res.p;
      stages.push_back(std::move(res.stage));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInstance, e.what());
  }
  const Eigen::VectorXd rebuilt = cascade_eval<double>(u, stages, m);
  JsonWriter w;
  w.begin_object();
  w.key("stages").begin_array();
  for (const auto& st : stages) {
    w.begin_object();
    w.key("nu").value(st.nu);
    w.key("Z").value(st.Z);
    w.key("support").value(static_cast<long long>(st.support()));
    w.key("alpha").begin_array();
    for (const auto& [j, a] : st.alpha)
      w.begin_object().key("j").value(static_cast<long long>(j + 1)).key("alpha").value(a).end_object();
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("p").value(p);
  w.key("p_reconstructed").value(rebuilt);
  w.key("max_abs_difference").value((p - rebuilt).cwiseAbs().maxCoeff());
  w.end_object();
  return w.str();
}

namespace {

template <typename F>
int run(const std::string& out, std::ostream& err, F&& make) {
  try {
    io::write_output(out, make());
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int cmd_path(const PathOptions& opt, std::ostream& err) {
  return run(opt.out, err, [&] { return path_document(opt); });
}

int cmd_solve(const SolveOptions& opt, std::ostream& err) {
  return run(opt.out, err, [&] { return solve_document(opt); });
}

int cmd_select(const SelectOptions& opt, std::ostream& err) {
  return run(opt.out, err, [&] { return select_document(opt); });
}

int cmd_sweep(const SweepOptions& opt, std::ostream& err) {
  return run(opt.out, err, [&] { return sweep_document(opt); });
}

int cmd_cascade(const CascadeOptions& opt, std::ostream& err) {
  return run(opt.out, err, [&] { return cascade_document(opt); });
}

}  // namespace relaxpath::cli
