#ifndef MESHPLAN_ERRORS_HPP
#define MESHPLAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace meshplan {

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : MeshError {
    using MeshError::MeshError;
};

struct TopologyError : MeshError {
    using MeshError::MeshError;
};

struct DegenerateTriangle : MeshError {
    using MeshError::MeshError;
};

struct DegenerateAngle : MeshError {
    using MeshError::MeshError;
};

struct EmptyMesh : MeshError {
    using MeshError::MeshError;
};

struct SolverDivergence : MeshError {
    using MeshError::MeshError;
};

struct FoldOver : MeshError {
    using MeshError::MeshError;
};

struct MismatchedMeshes : MeshError {
    using MeshError::MeshError;
};

struct GoalOutsideDisc : MeshError {
    using MeshError::MeshError;
};

struct NonFiniteState : MeshError {
    using MeshError::MeshError;
};

struct DegenerateTrajectory : MeshError {
    using MeshError::MeshError;
};

struct Unreachable : MeshError {
    using MeshError::MeshError;
};

struct ZeroGeodesic : MeshError {
    using MeshError::MeshError;
};

} // namespace meshplan

#endif // MESHPLAN_ERRORS_HPP
