#pragma once

#include <string>
#include <string_view>

namespace swsforge {

inline constexpr std::string_view kWsdlNs = "http://www.w3.org/ns/wsdl";
inline constexpr std::string_view kSawsdlNs = "http://www.w3.org/ns/sawsdl";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema";
inline constexpr std::string_view kWsdl11Ns = "http://schemas.xmlsoap.org/wsdl/";
inline constexpr std::string_view kBpelNs = "http://docs.oasis-open.org/wsbpel/2.0/process/executable";
inline constexpr std::string_view kPlnkNs = "http://docs.oasis-open.org/wsbpel/2.0/plnktype";
inline constexpr std::string_view kBpmnNs = "http://www.intalio.com/bpms";
// Extension attributes the toolchain reads back: parameter names on WSDL
// inputs/outputs and message shapes on BPEL variables.
inline constexpr std::string_view kPimExtNs = "urn:swsforge:pim";
inline constexpr std::string_view kSimExtNs = "urn:swsforge:sim";

/// XML NCName (no colon). Bytes >= 0x80 are accepted as name characters so
/// UTF-8 identifiers pass.
bool is_ncname(std::string_view s);

/// A URI with a scheme, a non-empty remainder, and only RFC 3986 characters.
/// Fragments are allowed since concept references usually carry one.
bool is_absolute_uri(std::string_view s);

/// Identifier usable inside a condition path segment: [A-Za-z_][A-Za-z0-9_-]*.
bool is_path_identifier(std::string_view s);

/// True for the XML Schema built-in type local names the toolchain accepts
/// as simple content (string, integer, boolean, ...).
bool is_xsd_builtin(std::string_view local_name);

/// Value category a built-in maps to at simulation time.
enum class ValueKind { integer, text, boolean };
ValueKind value_kind_of_builtin(std::string_view local_name);
std::string_view to_string(ValueKind kind);

/// Replaces characters outside [A-Za-z0-9_.-] with '_' and prefixes '_'
/// when the result would not start like an NCName ("Receive Request" ->
/// "Receive_Request").
std::string to_ncname(std::string_view s);

std::string trim(std::string_view s);
std::string lower_first(std::string_view s);
std::string upper_first(std::string_view s);

}  // namespace swsforge
