#pragma once

#include <string>
#include <vector>

#include "plap/analysis.hpp"
#include "plap/solver.hpp"

namespace plap {

/// CSV for diagnostic rows. Fixed header
///   name,p1,p2,eps,sigma,h,axis,center_x1,center_x2,r,R,lhs,rhs,ratio,slack,
///   pass,note
/// with doubles rendered %.17g (round-trip exact), pass as 0/1, and the note
/// quoted per RFC 4180 when it contains separators.
std::string diagnostics_csv(const std::vector<DiagnosticReport>& rows);

/// JSON document {"schema_version":1,"all_pass":...,"reports":[...]} with one
/// object per row (same fields as the CSV).
std::string diagnostics_json(const std::vector<DiagnosticReport>& rows);

/// CSV "eps,lhs,rhs,ratio" for the eps-convergence table.
std::string eps_table_csv(const std::vector<EpsConvergenceRow>& rows);

/// CSV "sigma,energy_min,energy_at_ueps,max_gap,minimality".
std::string sigma_table_csv(const std::vector<SigmaComparisonRow>& rows);

/// One refinement-study row: grid size, spacing, interior max error against a
/// closed-form solution, and the observed order between consecutive rows
/// (0 for the first row).
struct MmsRow {
  int nx = 0;
  double h = 0.0;
  double max_interior_error = 0.0;
  double rate = 0.0;
};

/// CSV "nx,h,max_interior_error,rate".
std::string mms_table_csv(const std::vector<MmsRow>& rows);

bool all_pass(const std::vector<DiagnosticReport>& rows);

/// Write content to path via a temporary file in the same directory plus an
/// atomic rename; creates parent directories. Throws std::runtime_error on
/// I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace plap
