#pragma once

#include <map>
#include <string>
#include <vector>

#include "tripwire/rng.hpp"
#include "tripwire/types.hpp"

namespace tripwire::pool {

enum class SecretKind { AccessToken, PrivateKey, None };

inline const char* secret_kind_name(SecretKind k) {
  switch (k) {
    case SecretKind::AccessToken: return "access-token";
    case SecretKind::PrivateKey: return "private-key";
    case SecretKind::None: return "none";
  }
  return "unknown";
}

inline SecretKind parse_secret_kind(const std::string& name) {
  if (name == "access-token") return SecretKind::AccessToken;
  if (name == "private-key") return SecretKind::PrivateKey;
  if (name == "none") return SecretKind::None;
  throw Error("tripwire-pool", "unknown secret kind '" + name + "'");
}

struct RoleSpec {
  ComponentRole role = ComponentRole::Decoy;
  Capability capability = Capability::CreateBucketDecoy;
  int min_placements = 1;
  int max_placements = 1;
};

/// A manually authored deceptive scenario: one decoy plus the lures whose
/// use gives it away.
struct TripwireDefinition {
  std::string id;
  std::string name;
  RoleSpec decoy_role;
  std::vector<RoleSpec> lure_roles;
  SecretKind secret_kind = SecretKind::None;
  std::string description;
};

struct TripwireInstance {
  std::string instance_id;
  std::string definition_id;
  std::string secret;  // empty when the definition has secret_kind none
  std::string decoy_placement;
  std::vector<std::string> lure_placements;
  TimeMs created_at = 0;
};

void validate_definition(const TripwireDefinition& def);

/// The built-in catalog: decoy S3-style bucket unlocked by an injected
/// access token, decoy SSH server unlocked by a planted private key, and a
/// hidden HTTP endpoint trap with no lure.
std::vector<TripwireDefinition> builtin_catalog();

class TripwirePool {
 public:
  /// Validates and replaces the whole catalog atomically.
  void load(const std::vector<TripwireDefinition>& definitions);

  bool has(const std::string& definition_id) const { return definitions_.count(definition_id) > 0; }
  const TripwireDefinition& definition(const std::string& id) const;
  std::vector<const TripwireDefinition*> definitions() const;
  std::size_t size() const { return definitions_.size(); }

  /// Fresh instance with a deterministic secret from the run's seeded
  /// stream. Placements stay empty until the controller binds them.
  TripwireInstance instantiate(const std::string& definition_id, Rng& secrets, TimeMs now);

 private:
  std::map<std::string, TripwireDefinition> definitions_;
  std::map<std::string, int> instance_counters_;
  int secret_serial_ = 0;
};

}  // namespace tripwire::pool
