#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaxpath/cascade.hpp"
#include "relaxpath/path.hpp"
#include "relaxpath/selection.hpp"

namespace relaxpath::io {

/// %.17g, with infinities as the strings "inf" / "-inf".
std::string format_number(double x);

/// Small pretty-printing JSON writer. Numeric vectors are written inline.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double x);
  JsonWriter& value(long long x);
  JsonWriter& value(int x) { return value(static_cast<long long>(x)); }
  JsonWriter& value(long x) { return value(static_cast<long long>(x)); }
  JsonWriter& value(bool b);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(const Eigen::VectorXd& v);
  JsonWriter& value(const Eigen::VectorXi& v);

  std::string str() const { return out_ + "\n"; }

 private:
  void element();
  void newline();

  struct Level {
    bool array;
    bool empty;
  };
  std::string out_;
  std::vector<Level> stack_;
  bool after_key_ = false;
};

struct InstanceFile {
  Eigen::VectorXd u;
  Eigen::VectorXd q;
  Eigen::VectorXd m;
  std::optional<Eigen::VectorXd> r;
  std::optional<Eigen::VectorXd> delta;
};

InstanceFile parse_instance(const std::string& text);
InstanceFile load_instance(const std::string& file);

/// The validated instance; a "delta" key routes through weighted_transform.
ProblemInstance<double> make_instance(const InstanceFile& f);

std::string path_to_json(const RelaxationPath<double>& path);
RelaxationPath<double> path_from_json(const std::string& text);

std::string read_file(const std::string& file);
void write_output(const std::string& file, const std::string& text);

}  // namespace relaxpath::io
