#include "relaxpath/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace relaxpath::io {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(x)) return "\"nan\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::element() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (stack_.empty()) return;
  if (!stack_.back().empty) out_ += ',';
  stack_.back().empty = false;
  newline();
}

JsonWriter& JsonWriter::begin_object() {
  element();
  out_ += '{';
  stack_.push_back({false, true});
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool empty = stack_.back().empty;
  stack_.pop_back();
  if (!empty) newline();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  element();
  out_ += '[';
  stack_.push_back({true, true});
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  const bool empty = stack_.back().empty;
  stack_.pop_back();
  if (!empty) newline();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  element();
  out_ += json(std::string(k)).dump();
  out_ += ": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  element();
  out_ += format_number(x);
  return *this;
}

JsonWriter& JsonWriter::value(long long x) {
  element();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(bool b) {
  element();
  out_ += b ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  element();
  out_ += json(std::string(s)).dump();
  return *this;
}

JsonWriter& JsonWriter::value(const Eigen::VectorXd& v) {
  element();
  out_ += '[';
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j) out_ += ", ";
    out_ += format_number(v[j]);
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::value(const Eigen::VectorXi& v) {
  element();
  out_ += '[';
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j) out_ += ", ";
    out_ += std::to_string(v[j]);
  }
  out_ += ']';
  return *this;
}

namespace {

double read_number(const json& x, const char* what) {
  if (x.is_number()) return x.get<double>();
  if (x.is_string()) {
    const auto s = x.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(Errc::InvalidInstance, std::string("expected a number for ") + what);
}

Eigen::VectorXd read_vector(const json& doc, const char* name) {
  const auto& arr = doc.at(name);
  if (!arr.is_array()) throw Error(Errc::InvalidInstance, std::string(name) + " must be an array");
  Eigen::VectorXd v(Eigen::Index(arr.size()));
  for (std::size_t j = 0; j < arr.size(); ++j) v[Eigen::Index(j)] = read_number(arr[j], name);
  return v;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInstance, std::string("malformed JSON: ") + e.what());
  }
}

SegmentSums<double> read_sums(const json& x) {
  return {read_number(x.at("M"), "M"), read_number(x.at("U"), "U"), read_number(x.at("Q"), "Q")};
}

void write_sums(JsonWriter& w, const SegmentSums<double>& s) {
  w.begin_object().key("M").value(s.M).key("U").value(s.U).key("Q").value(s.Q).end_object();
}

Direction parse_direction(const std::string& s) {
  for (Direction d : {Direction::ToPlus, Direction::ToMinus, Direction::ToZeroFromPlus,
                      Direction::ToZeroFromMinus})
    if (to_string(d) == s) return d;
  throw Error(Errc::InvalidInstance, "unknown transition direction " + s);
}

}  // namespace

InstanceFile parse_instance(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw Error(Errc::InvalidInstance, "instance file must be a JSON object");
  InstanceFile f;
  try {
    f.u = read_vector(doc, "u");
    f.q = read_vector(doc, "q");
    if (doc.contains("delta")) {
      if (doc.contains("m")) throw Error(Errc::InvalidInstance, "give either \"m\" or \"delta\"");
      f.delta = read_vector(doc, "delta");
      f.m = *f.delta;
    } else if (doc.contains("m")) {
      f.m = read_vector(doc, "m");
    } else {
      f.m = Eigen::VectorXd::Ones(f.u.size());
    }
    if (doc.contains("r")) f.r = read_vector(doc, "r");
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInstance, e.what());
  }
  return f;
}

InstanceFile load_instance(const std::string& file) { return parse_instance(read_file(file)); }

ProblemInstance<double> make_instance(const InstanceFile& f) {
  if (f.delta) return weighted_transform<double>(f.u, f.q, *f.delta);
  return validate_instance<double>(f.u, f.q, f.m);
}

std::string path_to_json(const RelaxationPath<double>& path) {
  JsonWriter w;
  w.begin_object();
  w.key("objective").value(to_string(path.objective));
  w.key("n").value(static_cast<long long>(path.n));
  w.key("kappa").value(static_cast<long long>(path.kappa()));
  w.key("nu_inf").value(path.nu_inf);
  w.key("mu_inf").value(path.mu_inf);
  w.key("initial_sums");
  write_sums(w, path.initial_sums);
  w.key("breakpoints").begin_array();
  for (Index k = 0; k < path.kappa(); ++k) {
    const auto& bp = path.breakpoints[std::size_t(k)];
    w.begin_object();
    w.key("nu").value(bp.nu);
    w.key("mu").value(bp.mu);
    w.key("transitions").begin_array();
    for (const auto& t : bp.transitions)
      w.begin_object()
          .key("j")
          .value(static_cast<long long>(t.coord + 1))
          .key("direction")
          .value(to_string(t.direction))
          .end_object();
    w.end_array();
    w.key("sums");
    write_sums(w, path.segment_sums[std::size_t(k)]);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

RelaxationPath<double> path_from_json(const std::string& text) {
  const json doc = parse_json(text);
  RelaxationPath<double> path;
  try {
    const auto obj = doc.at("objective").get<std::string>();
    if (obj == "entropy")
      path.objective = Objective::Entropy;
    else if (obj == "squared")
      path.objective = Objective::Squared;
    else
      throw Error(Errc::InvalidInstance, "unknown objective " + obj);
    path.n = doc.at("n").get<Index>();
    path.nu_inf = read_number(doc.at("nu_inf"), "nu_inf");
    path.mu_inf = read_number(doc.at("mu_inf"), "mu_inf");
    path.initial_sums = read_sums(doc.at("initial_sums"));
    for (const auto& b : doc.at("breakpoints")) {
      Breakpoint<double> bp;
      bp.nu = read_number(b.at("nu"), "nu");
      bp.mu = read_number(b.at("mu"), "mu");
      for (const auto& t : b.at("transitions")) {
        const Index j = t.at("j").get<Index>() - 1;
        if (j < 0 || j >= path.n) throw Error(Errc::InvalidInstance, "transition index out of range");
        bp.transitions.push_back({j, parse_direction(t.at("direction").get<std::string>())});
      }
      path.breakpoints.push_back(std::move(bp));
      path.segment_sums.push_back(read_sums(b.at("sums")));
    }
    if (doc.contains("kappa") && doc.at("kappa").get<Index>() != path.kappa())
      throw Error(Errc::InvalidInstance, "kappa does not match the breakpoint list");
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInstance, std::string("malformed path file: ") + e.what());
  }
  index_history(path);
  return path;
}

std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& file, const std::string& text) {
  if (file.empty() || file == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + file);
  out << text;
}

}  // namespace relaxpath::io
