#pragma once

#include <string>
#include <utility>
#include <vector>

#include <hierprox/linop.hpp>
#include <hierprox/trace.hpp>

namespace hierprox::cli {

struct IrisTable {
  RealMat features;          // 150 x 4
  std::vector<int> species;  // 0 setosa, 1 versicolor, 2 virginica
};

// Accepts the UCI layout (no header, species names) and the layout with a
// "150,4,setosa,versicolor,virginica" header and integer species codes.
IrisTable read_iris_csv(const std::string& path);

// Numeric CSV, comma separated, blank lines ignored.
RealMat read_numeric_csv(const std::string& path);
RealVec read_vector_csv(const std::string& path);

// iter,fp_residual,function_value,psi_value,distance
std::string format_trace_csv(const IterTrace& trace);

// Files staged in memory and published together: every file is written to a
// temporary sibling first, then all are renamed into place.
class OutputSet {
 public:
  void add(std::string path, std::string content);
  void commit();

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace hierprox::cli
