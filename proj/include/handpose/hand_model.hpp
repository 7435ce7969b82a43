#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace handpose {

// One joint angle of the kinematic hand model.
struct DofDescriptor {
  std::string name;         // short label, e.g. "TM"
  std::string description;  // e.g. "Thumb Metacarpal"
  int index = 0;            // 0-based position in the joint vector
};

// Ordered set of degrees of freedom defining the joint-vector layout.
// Immutable after construction; safe to share across threads.
class HandModel {
 public:
  explicit HandModel(std::vector<DofDescriptor> dofs);

  int size() const { return static_cast<int>(dofs_.size()); }
  const std::vector<DofDescriptor>& dofs() const { return dofs_; }
  const DofDescriptor& dof(int index) const { return dofs_.at(static_cast<std::size_t>(index)); }

  bool has(const std::string& name) const;
  int index_of(const std::string& name) const;  // throws UnknownDof
  std::vector<std::string> names() const;

  bool operator==(const HandModel& other) const;

 private:
  std::vector<DofDescriptor> dofs_;
};

// The canonical 15-DoF model: thumb abduction/rotation/metacarpal/
// interphalangeal, then abduction/metacarpal/proximal for index, middle
// (no abduction), ring and little fingers.
HandModel default_hand_model();

// Model over an arbitrary ordered name list; descriptions are filled in from
// the canonical model where the names match.
HandModel model_from_dof_names(const std::vector<std::string>& names);

// m x n matrix whose row k is the canonical basis vector of names[k]'s index.
// Order-sensitive: permuting names permutes rows identically.
Eigen::MatrixXd selection_matrix(const HandModel& model, const std::vector<std::string>& names);

}  // namespace handpose
