#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace nehs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorView = Eigen::Ref<const Eigen::VectorXd>;

// Named-entity categories covered by hypersphere models. `All` denotes the
// union of the three concrete types.
enum class NeType { Per, Loc, Org, All };

inline constexpr std::array<NeType, 3> kEntityTypes{NeType::Per, NeType::Loc, NeType::Org};

std::string_view to_string(NeType type);
std::optional<NeType> parse_ne_type(std::string_view text);

// Position of a concrete type in kEntityTypes. `All` has no slot.
std::size_t type_slot(NeType type);

}  // namespace nehs
