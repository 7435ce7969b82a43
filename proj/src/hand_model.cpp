#include "handpose/hand_model.hpp"

#include <unordered_set>

#include "handpose/errors.hpp"

namespace handpose {

HandModel::HandModel(std::vector<DofDescriptor> dofs) : dofs_(std::move(dofs)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < dofs_.size(); ++i) {
    if (!seen.insert(dofs_[i].name).second) {
      fail(ErrorCode::DuplicateDof, "duplicate DoF name '" + dofs_[i].name + "'");
    }
    if (dofs_[i].index != static_cast<int>(i)) {
      fail(ErrorCode::InvalidConfig, "DoF indices must form a contiguous 0..n-1 sequence");
    }
  }
}

bool HandModel::has(const std::string& name) const {
  for (const auto& d : dofs_) {
    if (d.name == name) return true;
  }
  return false;
}

int HandModel::index_of(const std::string& name) const {
  for (const auto& d : dofs_) {
    if (d.name == name) return d.index;
  }
  fail(ErrorCode::UnknownDof, "no DoF named '" + name + "'");
}

std::vector<std::string> HandModel::names() const {
  std::vector<std::string> out;
  out.reserve(dofs_.size());
  for (const auto& d : dofs_) out.push_back(d.name);
  return out;
}

bool HandModel::operator==(const HandModel& other) const {
  if (dofs_.size() != other.dofs_.size()) return false;
  for (std::size_t i = 0; i < dofs_.size(); ++i) {
    if (dofs_[i].name != other.dofs_[i].name) return false;
  }
  return true;
}

HandModel default_hand_model() {
  std::vector<DofDescriptor> dofs = {
      {"TA", "Thumb Abduction", 0},
      {"TR", "Thumb Rotation", 1},
      {"TM", "Thumb Metacarpal", 2},
      {"TI", "Thumb Interphalangeal", 3},
      {"IA", "Index Abduction", 4},
      {"IM", "Index Metacarpal", 5},
      {"IP", "Index Proximal", 6},
      {"MM", "Middle Metacarpal", 7},
      {"MP", "Middle Proximal", 8},
      {"RA", "Ring Abduction", 9},
      {"RM", "Ring Metacarpal", 10},
      {"RP", "Ring Proximal", 11},
      {"LA", "Little Abduction", 12},
      {"LM", "Little Metacarpal", 13},
      {"LP", "Little Proximal", 14},
  };
  return HandModel(std::move(dofs));
}

HandModel model_from_dof_names(const std::vector<std::string>& names) {
  const HandModel canonical = default_hand_model();
  std::vector<DofDescriptor> dofs;
  dofs.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string description;
    if (canonical.has(names[i])) {
      description = canonical.dof(canonical.index_of(names[i])).description;
    }
    dofs.push_back(DofDescriptor{names[i], std::move(description), static_cast<int>(i)});
  }
  return HandModel(std::move(dofs));
}

Eigen::MatrixXd selection_matrix(const HandModel& model, const std::vector<std::string>& names) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      fail(ErrorCode::DuplicateDof, "DoF '" + name + "' selected twice");
    }
  }
  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(names.size()), model.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    sel(static_cast<Eigen::Index>(k), model.index_of(names[k])) = 1.0;
  }
  return sel;
}

}  // namespace handpose
