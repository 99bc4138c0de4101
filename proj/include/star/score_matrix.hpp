#pragma once

#include <string>
#include <vector>

#include "star/kg.hpp"

namespace star {

// One evaluation query's dense candidate scores; the shared interchange
// format between the text scorers, the geometric baselines and the ensemble.
struct ScoreBlock {
  int32_t query_index = 0;
  Triple source{0, 0, 0};
  Direction dir = Direction::PredictTail;
  EntityId gold = 0;
  std::vector<EntityId> candidates;
  std::vector<double> scores;
};

struct ScoreMatrix {
  std::vector<ScoreBlock> blocks;
};

void save_score_matrix(const std::string& path, const ScoreMatrix& m);
ScoreMatrix load_score_matrix(const std::string& path);

}  // namespace star
