#pragma once

#include "qgdirac/csv.hpp"
#include "qgdirac/limit.hpp"
#include "qgdirac/nonlinearity.hpp"
#include "qgdirac/operators.hpp"
#include "qgdirac/solvers.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qgdirac {

/// Solution files: columns (edge_id, x, u, w). Integer-node rows leave w
/// empty, half-node rows leave u empty; rows are interleaved by x edge by
/// edge, so a vertex value is repeated on every incident edge.
CsvTable solution_table(const SpinorFunction<double>& psi);
CsvTable solution_table(const GraphFunction<double>& u);

/// Inverse of solution_table on the mesh the solution was written from.
/// Throws std::invalid_argument when a row does not match a mesh node.
SpinorFunction<double> parse_solution(const CsvTable& table, const MeshPtr& mesh);

/// key,value rows describing a solve.
CsvTable report_table(const SolveReport& report, const std::vector<std::pair<std::string, std::string>>& extra = {});
/// iteration,residual,damping.
CsvTable history_table(const SolveReport& report);

/// index,eigenvalue,residual.
CsvTable spectrum_table(const EigenDecomposition<Complex>& eig);

CsvTable experiment_table(const ExperimentTable& table);
CsvTable fits_table(const std::vector<RateFitSummary>& fits);

/// hypothesis,pass,witness_s,detail; the growth bound is the last row.
CsvTable hypothesis_table(const HypothesisReport& report, const GrowthBoundReport& growth);

}  // namespace qgdirac
