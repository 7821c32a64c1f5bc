#include "tripwire/tripwire_pool.hpp"

#include <algorithm>

namespace tripwire::pool {

void validate_definition(const TripwireDefinition& def) {
  if (def.id.empty()) throw Error("tripwire-pool", "definition has empty id");
  if (def.decoy_role.role != ComponentRole::Decoy)
    throw Error("tripwire-pool", "definition '" + def.id + "': decoy_role must have role decoy");
  if (def.decoy_role.min_placements != 1 || def.decoy_role.max_placements != 1)
    throw Error("tripwire-pool", "definition '" + def.id + "': decoy role must have min=max=1");
  for (const auto& lure : def.lure_roles) {
    if (lure.role != ComponentRole::Lure)
      throw Error("tripwire-pool", "definition '" + def.id + "': lure_roles entry with role decoy");
    if (lure.min_placements < 1)
      throw Error("tripwire-pool", "definition '" + def.id + "': min_placements must be >= 1");
    if (lure.max_placements < lure.min_placements)
      throw Error("tripwire-pool", "definition '" + def.id + "': max_placements < min_placements");
  }
  if (!def.lure_roles.empty() && def.secret_kind == SecretKind::None)
    throw Error("tripwire-pool",
                "definition '" + def.id + "': lures require a linking secret kind");
}

std::vector<TripwireDefinition> builtin_catalog() {
  std::vector<TripwireDefinition> defs;

  TripwireDefinition bucket;
  bucket.id = "tw-bucket";
  bucket.name = "decoy bucket with injected access token";
  bucket.decoy_role = {ComponentRole::Decoy, Capability::CreateBucketDecoy, 1, 1};
  bucket.lure_roles = {{ComponentRole::Lure, Capability::InjectFileToken, 1, 2}};
  bucket.secret_kind = SecretKind::AccessToken;
  bucket.description =
      "Empty storage bucket watched for access; its access token is planted "
      "as a file on other targets.";
  defs.push_back(bucket);

  TripwireDefinition ssh;
  ssh.id = "tw-ssh";
  ssh.name = "decoy ssh server with planted private key";
  ssh.decoy_role = {ComponentRole::Decoy, Capability::CreateSshDecoy, 1, 1};
  ssh.lure_roles = {{ComponentRole::Lure, Capability::InjectFileToken, 1, 2}};
  ssh.secret_kind = SecretKind::PrivateKey;
  ssh.description =
      "Standalone decoy host running an ssh service; the matching private "
      "key is dropped where an intruder would look for credentials.";
  defs.push_back(ssh);

  TripwireDefinition endpoint;
  endpoint.id = "tw-endpoint";
  endpoint.name = "hidden http endpoint trap";
  endpoint.decoy_role = {ComponentRole::Decoy, Capability::InjectHttpEndpoint, 1, 1};
  endpoint.secret_kind = SecretKind::None;
  endpoint.description =
      "Unlinked endpoint injected into a web application; any request to it "
      "is an alarm. No lure points at it.";
  defs.push_back(endpoint);

  return defs;
}

void TripwirePool::load(const std::vector<TripwireDefinition>& definitions) {
  std::map<std::string, TripwireDefinition> staged;
  for (const auto& def : definitions) {
    validate_definition(def);
    if (!staged.emplace(def.id, def).second)
      throw Error("tripwire-pool", "duplicate definition id '" + def.id + "'");
  }
  definitions_ = std::move(staged);
}

const TripwireDefinition& TripwirePool::definition(const std::string& id) const {
  auto it = definitions_.find(id);
  if (it == definitions_.end()) throw Error("tripwire-pool", "unknown definition '" + id + "'");
  return it->second;
}

std::vector<const TripwireDefinition*> TripwirePool::definitions() const {
  std::vector<const TripwireDefinition*> out;
  out.reserve(definitions_.size());
  for (const auto& [id, def] : definitions_) out.push_back(&def);
  return out;
}

namespace {

std::string counter_hex(int value, std::size_t width) {
  static const char* digits = "0123456789abcdef";
  std::string out(width, '0');
  for (std::size_t i = width; i-- > 0 && value > 0; value >>= 4) out[i] = digits[value & 0xF];
  return out;
}

}  // namespace

TripwireInstance TripwirePool::instantiate(const std::string& definition_id, Rng& secrets,
                                           TimeMs now) {
  const TripwireDefinition& def = definition(definition_id);
  TripwireInstance inst;
  int n = ++instance_counters_[definition_id];
  inst.instance_id = definition_id + "#" + std::to_string(n);
  inst.definition_id = definition_id;
  inst.created_at = now;
  // A run-wide counter is baked into the leading hex chars: secrets stay
  // reproducible per seed and pairwise distinct within a run by construction.
  int serial = ++secret_serial_;
  switch (def.secret_kind) {
    case SecretKind::AccessToken:
      inst.secret = counter_hex(serial, 8) + secrets.hex(24);
      break;
    case SecretKind::PrivateKey:
      inst.secret = "ssh-ed25519-fp-" + counter_hex(serial, 4) + secrets.hex(12);
      break;
    case SecretKind::None:
      inst.secret.clear();
      break;
  }
  return inst;
}

}  // namespace tripwire::pool
