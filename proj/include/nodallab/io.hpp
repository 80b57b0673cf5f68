#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "nodallab/field.hpp"
#include "nodallab/nodal_set.hpp"
#include "nodallab/profile.hpp"
#include "nodallab/trace.hpp"

namespace nodallab::io {

/// Text container:
///
///     NODALLAB v1 <kind>
///     key=value            (metadata, one per line)
///     ...
///     <samples>            (whitespace separated, 17 significant digits)
///
/// Kinds: `profile` (values then derivative), `field-homogeneous` (gamma plus
/// a profile), `field-grid` (n*n samples) and `field-closed-form` (no
/// samples; one `term=` line per summand). Rescaled fields are not
/// persistable.
inline constexpr const char* kMagic = "NODALLAB";
inline constexpr int kVersion = 1;

using Persistable = std::variant<AngularProfile, PlanarField>;

std::string to_text(const AngularProfile& profile);
std::string to_text(const PlanarField& field);
Persistable from_text(const std::string& text);

void save(const AngularProfile& profile, const std::filesystem::path& path);
void save(const PlanarField& field, const std::filesystem::path& path);
Persistable load(const std::filesystem::path& path);
AngularProfile load_profile(const std::filesystem::path& path);
PlanarField load_field(const std::filesystem::path& path);

/// Columns `r,value`, 17 significant digits.
std::string trace_to_csv(const FunctionalTrace& trace);
FunctionalTrace trace_from_csv(const std::string& text);
void save_trace_csv(const FunctionalTrace& trace, const std::filesystem::path& path);
FunctionalTrace load_trace_csv(const std::filesystem::path& path);

/// Segments as `x1,y1,x2,y2` rows; singular points go to a JSON sidecar.
std::string segments_to_csv(const NodalSet& nodal);
std::string singular_points_to_json(const NodalSet& nodal);
void save_nodal(const NodalSet& nodal, const std::filesystem::path& csv_path, const std::filesystem::path& json_path);
NodalSet load_nodal(const std::filesystem::path& csv_path, const std::filesystem::path& json_path = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// "%.17g" formatting used by every text output.
std::string format_double(double v);

}  // namespace nodallab::io
