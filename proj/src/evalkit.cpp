#include "webaug/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "webaug/jsonl.hpp"

namespace webaug {

std::vector<SweepPoint>
sweep(const std::function<LabeledDataset(double)> &builder,
      const std::vector<double> &grid, const TruthTable *truth) {
  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  double prev = -1.0;
  for (double t : grid) {
    if (t < 0.0 || t > 1.0)
      throw std::invalid_argument("sweep grid values must lie in [0,1]");
    if (t < prev)
      throw std::invalid_argument("sweep grid must be ascending");
    prev = t;
    LabeledDataset ds = builder(t);
    SweepPoint point;
    point.threshold = t;
    point.quantity = ds.size();
    if (truth && !ds.items.empty()) {
      uint64_t correct = 0;
      for (const LabeledImage &img : ds.items)
        if (truth->lookup(img.item_id) == img.category_id)
          ++correct;
      point.accuracy =
          static_cast<double>(correct) / static_cast<double>(ds.size());
    }
    points.push_back(point);
  }
  return points;
}

void write_sweep_tsv(const std::string &path,
                     const std::vector<SweepPoint> &points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write sweep file: " + path);
  out << "threshold\tquantity\taccuracy\n";
  char buf[64];
  for (const SweepPoint &p : points) {
    std::snprintf(buf, sizeof buf, "%.6g", p.threshold);
    out << buf << '\t' << p.quantity << '\t';
    if (p.accuracy) {
      std::snprintf(buf, sizeof buf, "%.6f", *p.accuracy);
      out << buf;
    } else {
      out << '-';
    }
    out << '\n';
  }
  if (!out)
    throw std::runtime_error("failed writing sweep file: " + path);
}

double ndcg_with_base(const std::vector<int> &relevances, int depth,
                      double log_base) {
  if (depth < 1)
    throw std::invalid_argument("ndcg depth must be at least 1");
  if (relevances.empty())
    throw std::invalid_argument("ndcg over an empty list");
  if (!(log_base > 1.0))
    throw std::invalid_argument("log base must exceed 1");

  const size_t limit = std::min(relevances.size(), static_cast<size_t>(depth));
  const double base_ln = std::log(log_base);
  auto dcg = [&](const std::vector<int> &rel) {
    double sum = 0.0;
    for (size_t j = 0; j < limit; ++j) {
      const double gain = std::exp2(static_cast<double>(rel[j])) - 1.0;
      sum += gain / (std::log(static_cast<double>(j) + 2.0) / base_ln);
    }
    return sum;
  };

  std::vector<int> ideal = relevances;
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  const double ideal_mass = dcg(ideal);
  if (ideal_mass <= 0.0)
    return 0.0;
  return dcg(relevances) / ideal_mass;
}

double ndcg(const std::vector<int> &relevances, int depth) {
  return ndcg_with_base(relevances, depth, std::exp(1.0));
}

std::vector<RankedList> read_ndcg_batch(const std::string &path) {
  std::vector<RankedList> lists;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    auto fail = [&](const std::string &why) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": " + why);
    };
    RankedList list;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      if (comma == std::string_view::npos)
        comma = line.size();
      std::string_view tok = line.substr(pos, comma - pos);
      while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
        tok.remove_prefix(1);
      while (!tok.empty() &&
             (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
        tok.remove_suffix(1);
      if (tok.empty())
        fail("empty grade");
      if (tok.size() != 1 ||
          (tok[0] != '0' && tok[0] != '2' && tok[0] != '3'))
        fail("grade must be one of 0, 2, 3");
      list.relevances.push_back(tok[0] - '0');
      pos = comma + 1;
    }
    lists.push_back(std::move(list));
  });
  return lists;
}

} // namespace webaug
