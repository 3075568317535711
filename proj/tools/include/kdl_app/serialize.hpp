#pragma once

#include <json.hpp>

#include "kdl/bounds.hpp"
#include "kdl/minimax.hpp"
#include "kdl/model.hpp"
#include "kdl/oracle.hpp"
#include "kdl/solve.hpp"

namespace kdl {

template <class Tag>
void to_json(nlohmann::json& j, const TaggedVector<Tag>& v) {
    j = nlohmann::json::array();
    for (int k = 0; k < v.size(); ++k) j.push_back(v[k]);
}

template <class Tag>
void from_json(const nlohmann::json& j, TaggedVector<Tag>& v) {
    v = TaggedVector<Tag>(Eigen::Map<const Eigen::VectorXd>(j.get<std::vector<double>>().data(),
                                                            static_cast<Eigen::Index>(j.size())));
}

void to_json(nlohmann::json& j, const ConditionResult& c);
void to_json(nlohmann::json& j, const HypothesisReport& r);
void to_json(nlohmann::json& j, const ProblemSpec& p);
void to_json(nlohmann::json& j, const ConstantBundle& b);
void to_json(nlohmann::json& j, const SolverStats& s);
void to_json(nlohmann::json& j, const GapReport& g);
void to_json(nlohmann::json& j, const OscillationReport& o);
void to_json(nlohmann::json& j, const CriticalPoint& p);
void to_json(nlohmann::json& j, const Certificate& c);
void to_json(nlohmann::json& j, const GridGapResult& g);

void from_json(const nlohmann::json& j, ConstantBundle& b);
void from_json(const nlohmann::json& j, GapReport& g);
void from_json(const nlohmann::json& j, CriticalPoint& p);

PointKind point_kind_from_string(const std::string& s);

}  // namespace kdl
