#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "market_gen.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/crypto/hash.hpp"
#include "marketpalace/market/messages.hpp"

namespace mp = marketpalace;
using namespace marketpalace::market;
using mptest::certified;
using mptest::server_keys;
using mptest::user_keys;

namespace {

mp::Errc error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const mp::Error& e) {
    return e.code();
  }
  FAIL_CHECK("expected an error");
  return mp::Errc::io;
}

struct MarketTest {
  mp::ManualClock clock{1'700'000'000};
  const mp::crypto::KeyPair& alice = user_keys(0);
  const mp::crypto::KeyPair& bob = user_keys(1);
  mp::crypto::CertifiedKey alice_cert = certified(alice);
  mp::crypto::CertifiedKey bob_cert = certified(bob);

  SignedListing bike(std::int64_t ttl = kDefaultListingTtlSeconds) {
    return create_signed_listing(alice.private_key, alice_cert, ListingDraft{"bike", "red, barely used", 5000, "EUR", ttl},
                                 clock);
  }
};

}  // namespace

TEST_CASE_FIXTURE(MarketTest, "MarketTest.CreateAndVerify") {
  auto sl = bike(604800);
  CHECK_EQ(verify_signed_listing(server_keys().public_key, sl, clock), ListingCheck::valid);
  CHECK_EQ(sl.listing.expires_at, clock.now() + 604800);
  CHECK_EQ(sl.listing.owner_fingerprint, alice_cert.fingerprint());
  CHECK_EQ(sl.content_id, sl.listing.content_id());
  CHECK_EQ(sl.content_id.hex(), mp::hex_encode(mp::crypto::sha256(mp::canonical_bytes(sl.listing.to_json()))));
  CHECK_NE(bike().content_id, bike().content_id);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.FieldBounds") {
  auto make = [&](ListingDraft d) { create_signed_listing(alice.private_key, alice_cert, d, clock); };
  CHECK_EQ(error_code([&] { make({"", "d", 1, "EUR"}); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { make({std::string(141, 'x'), "d", 1, "EUR"}); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { make({"t", std::string(4097, 'x'), 1, "EUR"}); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { make({"t", "d", -1, "EUR"}); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { make({"t", "d", 1, "eur"}); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { make({"t", "d", 1, "EUR", 0}); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { create_signed_listing(alice.private_key, bob_cert, {"t", "d", 1, "EUR"}, clock); }), mp::Errc::rejected_parameters);
  // 140 multi-byte characters are fine.
  std::string title;
  for (int i = 0; i < 140; ++i) title += "\xc3\xa9";
  CHECK_NOTHROW(make({title, std::string(4096, 'x'), 0, "JPY"}));
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.VerificationOrder") {
  auto sl = bike();
  auto price = sl;
  price.listing.price_amount = 1;
  CHECK_EQ(verify_signed_listing(server_keys().public_key, price, clock), ListingCheck::bad_signature);

  auto swapped = sl;
  swapped.owner_cert = bob_cert;
  CHECK_EQ(verify_signed_listing(server_keys().public_key, swapped, clock), ListingCheck::fingerprint_mismatch);

  auto self = sl;
  self.owner_cert = mptest::self_signed(alice);
  CHECK_EQ(verify_signed_listing(server_keys().public_key, self, clock), ListingCheck::bad_cert);

  auto sig = sl;
  sig.signature[10] ^= 1;
  CHECK_EQ(verify_signed_listing(server_keys().public_key, sig, clock), ListingCheck::bad_signature);

  // A failing cert is reported before anything else.
  auto both = price;
  both.owner_cert = mptest::self_signed(alice);
  CHECK_EQ(verify_signed_listing(server_keys().public_key, both, clock), ListingCheck::bad_cert);

  mp::ManualClock later(sl.listing.expires_at);
  CHECK_EQ(verify_signed_listing(server_keys().public_key, sl, later), ListingCheck::expired);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.EveryFieldChangesTheContentId") {
  auto l = bike().listing;
  auto base = l.content_id();
  std::vector<std::function<void(Listing&)>> mutations{
      [](Listing& x) { x.title += "!"; },
      [](Listing& x) { x.description += "!"; },
      [](Listing& x) { x.price_amount += 1; },
      [](Listing& x) { x.currency = "USD"; },
      [](Listing& x) { x.owner_fingerprint[31] ^= 1; },
      [](Listing& x) { x.created_at += 1; },
      [](Listing& x) { x.expires_at += 1; },
      [](Listing& x) { x.nonce ^= 1; },
  };
  for (std::size_t i = 0; i < mutations.size(); ++i) {
    auto m = l;
    mutations[i](m);
    CHECK_MESSAGE(m.content_id() != base, i);
  }
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.JsonRoundtrips") {
  auto sl = bike();
  auto back = SignedListing::from_json(mp::parse_json(mp::canonical_dump(sl.to_json())));
  CHECK_EQ(back, sl);
  auto j = sl.listing.to_json();
  j["extra"] = 1;
  CHECK_EQ(error_code([&] { Listing::from_json(j); }), mp::Errc::parse);
  auto t = make_tombstone(alice.private_key, sl.content_id, 5);
  CHECK_EQ(Tombstone::from_json(t.to_json()), t);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.MergeAcceptsThenDuplicates") {
  ListingStore store(server_keys().public_key);
  std::vector<SignedListing> batch{bike(), bike(), bike()};
  auto r = store.merge(batch, {}, clock);
  CHECK_EQ(r.accepted, 3u);
  CHECK_EQ(store.size(), 3u);
  auto again = store.merge(batch, {}, clock);
  CHECK_EQ(again.duplicates, 3u);
  CHECK_EQ(again.accepted, 0u);
  CHECK_EQ(store.size(), 3u);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.MergeRejectsForgeries") {
  ListingStore store(server_keys().public_key);
  mptest::MarketCorpus corpus(clock);
  auto r = store.merge(corpus.forged(), {}, clock);
  CHECK_EQ(r.rejected, corpus.forged().size());
  CHECK_EQ(store.size(), 0u);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.TombstoneWinsInEitherOrder") {
  auto sl = bike();
  auto t = make_tombstone(alice.private_key, sl.content_id, clock.now());
  for (int order = 0; order < 2; ++order) {
    ListingStore store(server_keys().public_key);
    if (order == 0) {
      store.merge(std::vector{sl}, {}, clock);
      store.merge({}, std::vector{t}, clock);
    } else {
      store.merge({}, std::vector{t}, clock);
      CHECK_EQ(store.pending_tombstones(), 1u);
      store.merge(std::vector{sl}, {}, clock);
    }
    CHECK_FALSE_MESSAGE(store.contains(sl.content_id), order);
    CHECK(store.is_tombstoned(sl.content_id));
    store.merge(std::vector{sl}, {}, clock);
    CHECK_FALSE(store.contains(sl.content_id));
    CHECK_EQ(store.pending_tombstones(), 0u);
  }
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.ForeignTombstoneIsRejected") {
  ListingStore store(server_keys().public_key);
  auto sl = bike();
  store.merge(std::vector{sl}, {}, clock);
  auto t = make_tombstone(bob.private_key, sl.content_id, clock.now());
  auto r = store.merge({}, std::vector{t}, clock);
  CHECK_EQ(r.tombstones_rejected, 1u);
  CHECK(store.contains(sl.content_id));
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.TombstoneVerifiesOnlyUnderOwner") {
  auto sl = bike();
  auto t = make_tombstone(alice.private_key, sl.content_id, clock.now());
  CHECK(t.verify(alice.public_key));
  for (int i = 1; i < 4; ++i) CHECK_FALSE(t.verify(user_keys(i).public_key));
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.RemoveListing") {
  ListingStore store(server_keys().public_key);
  auto sl = bike();
  store.merge(std::vector{sl}, {}, clock);
  CHECK_EQ(error_code([&] { store.remove_listing(bob.private_key, bob_cert, sl.content_id, clock); }), mp::Errc::authorization);
  CHECK_EQ(error_code([&] {
              store.remove_listing(alice.private_key, alice_cert, ContentId(mp::crypto::sha256({})), clock);
            }), mp::Errc::not_found);
  auto t = store.remove_listing(alice.private_key, alice_cert, sl.content_id, clock);
  CHECK_FALSE(store.contains(sl.content_id));
  CHECK(t.verify(alice.public_key));
  auto snap = store.snapshot(clock);
  CHECK(snap.listings.empty());
  REQUIRE_EQ(snap.tombstones.size(), 1u);
  CHECK_EQ(snap.tombstones[0], t);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.ExpiryIsMonotone") {
  ListingStore store(server_keys().public_key);
  auto short_lived = bike(1);
  auto long_lived = bike();
  store.merge(std::vector{short_lived, long_lived}, {}, clock);
  CHECK_EQ(store.expire(clock), 0u);
  mp::ManualClock later(clock.now() + 2);
  CHECK_EQ(store.expire(later), 1u);
  CHECK_FALSE(store.contains(short_lived.content_id));
  CHECK(store.contains(long_lived.content_id));
  for (int dt = 3; dt < 10; ++dt) {
    mp::ManualClock t(clock.now() + dt);
    CHECK_EQ(verify_signed_listing(server_keys().public_key, short_lived, t), ListingCheck::expired);
  }
  CHECK_EQ(store.merge(std::vector{short_lived}, {}, later).rejected, 1u);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.TombstoneRetentionEndsAfterGrace") {
  ListingStore store(server_keys().public_key);
  auto sl = bike(100);
  store.merge(std::vector{sl}, {}, clock);
  store.remove_listing(alice.private_key, alice_cert, sl.content_id, clock);
  mp::ManualClock before(sl.listing.expires_at + kTombstoneGraceSeconds - 1);
  store.expire(before);
  CHECK(store.is_tombstoned(sl.content_id));
  mp::ManualClock after(sl.listing.expires_at + kTombstoneGraceSeconds);
  store.expire(after);
  CHECK_FALSE(store.is_tombstoned(sl.content_id));
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.PersistenceRoundtrip") {
  mptest::TempDir dir;
  auto kept = bike();
  auto removed = bike();
  {
    ListingStore store(server_keys().public_key, dir.path());
    store.merge(std::vector{kept, removed}, {}, clock);
    store.remove_listing(alice.private_key, alice_cert, removed.content_id, clock);
  }
  CHECK(std::filesystem::exists(dir / "listings" / (kept.content_id.hex() + ".json")));
  CHECK_FALSE(std::filesystem::exists(dir / "listings" / (removed.content_id.hex() + ".json")));
  CHECK(std::filesystem::exists(dir / "tombstones.json"));
  ListingStore reloaded(server_keys().public_key, dir.path());
  reloaded.load(clock);
  CHECK(reloaded.contains(kept.content_id));
  CHECK_FALSE(reloaded.contains(removed.content_id));
  CHECK(reloaded.is_tombstoned(removed.content_id));
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.LoadDropsTamperedFiles") {
  mptest::TempDir dir;
  auto sl = bike();
  {
    ListingStore store(server_keys().public_key, dir.path());
    store.merge(std::vector{sl}, {}, clock);
  }
  auto path = dir / "listings" / (sl.content_id.hex() + ".json");
  auto j = mp::parse_json(mp::read_file(path));
  j["listing"]["price_amount"] = 1;
  mp::write_file_atomic(path, j.dump());
  ListingStore reloaded(server_keys().public_key, dir.path());
  reloaded.load(clock);
  CHECK_EQ(reloaded.size(), 0u);
}

TEST_CASE_FIXTURE(MarketTest, "MarketTest.MergeIsCommutativeAndIdempotent") {
  mptest::MarketCorpus corpus(clock);
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 100; ++i) {
    auto a = corpus.random_batch(rng);
    auto b = corpus.random_batch(rng);
    auto ab = mptest::replay({&a, &b}, clock);
    auto ba = mptest::replay({&b, &a}, clock);
    auto aab = mptest::replay({&a, &a, &b, &b}, clock);
    CHECK_MESSAGE(ab->same_state(*ba), i);
    CHECK_MESSAGE(ab->same_state(*aab), i);
    CHECK(mptest::store_is_sound(*ab, clock));
    auto removed = corpus.removed_by(a);
    for (const auto& id : corpus.removed_by(b)) removed.insert(id);
    for (const auto& id : removed) CHECK_FALSE(ab->contains(id));
  }
}

TEST_CASE("Bid.PayloadRoundtrip") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    mp::Digest fp{};
    for (auto& b : fp) b = static_cast<std::uint8_t>(rng());
    auto id = ContentId(mp::crypto::sha256(mp::as_bytes(std::to_string(rng()))));
    auto bid = Bid::create(id, static_cast<std::int64_t>(rng() % 1'000'000), "EUR", fp,
                           static_cast<std::int64_t>(rng() % 2'000'000'000));
    CHECK_EQ(parse_bid_payload(make_bid_payload(bid)), bid);
  }
}

TEST_CASE("Bid.RejectsBadValues") {
  auto id = ContentId(mp::crypto::sha256({}));
  CHECK_EQ(error_code([&] { Bid::create(id, -1, "EUR", {}, 0); }), mp::Errc::validation);
  CHECK_EQ(error_code([&] { Bid::create(id, 1, "euro", {}, 0); }), mp::Errc::validation);
  auto j = Bid::create(id, 1, "EUR", {}, 0).to_json();
  j["injected"] = "x";
  auto payload = mp::canonical_bytes(j);
  CHECK_EQ(error_code([&] { parse_bid_payload(payload); }), mp::Errc::parse);
  CHECK_EQ(error_code([&] { parse_bid_payload(mp::as_bytes("{not json")); }), mp::Errc::parse);
  auto missing = Bid::create(id, 1, "EUR", {}, 0).to_json();
  missing.erase("amount");
  CHECK_EQ(error_code([&] { parse_bid_payload(mp::canonical_bytes(missing)); }), mp::Errc::parse);
}

TEST_CASE("Chat.ChannelIdIsSymmetricAndRecomputable") {
  mp::Digest a = mp::crypto::sha256(mp::as_bytes("a"));
  mp::Digest b = mp::crypto::sha256(mp::as_bytes("b"));
  auto c1 = ContentId(mp::crypto::sha256(mp::as_bytes("l1")));
  auto c2 = ContentId(mp::crypto::sha256(mp::as_bytes("l2")));
  CHECK_EQ(chat_channel_id(a, b, c1), chat_channel_id(b, a, c1));
  CHECK_NE(chat_channel_id(a, b, c1), chat_channel_id(a, b, c2));
  mp::Bytes material;
  const auto& lo = std::min(a, b);
  const auto& hi = std::max(a, b);
  material.insert(material.end(), lo.begin(), lo.end());
  material.insert(material.end(), hi.begin(), hi.end());
  material.insert(material.end(), c1.digest().begin(), c1.digest().end());
  CHECK_EQ(chat_channel_id(a, b, c1), mp::crypto::sha256(material));
  CHECK_EQ(error_code([&] { chat_channel_id(a, a, c1); }), mp::Errc::validation);
}

TEST_CASE("Chat.MessageBoundsAndRoundtrip") {
  ChatMessage m{mp::crypto::sha256({}), ContentId(mp::crypto::sha256({})), "hello", 7};
  CHECK_EQ(ChatMessage::from_json(m.to_json()), m);
  m.body = std::string(4097, 'x');
  CHECK_EQ(error_code([&] { m.validate(); }), mp::Errc::validation);
}

TEST_CASE("Chat.DirectMessageCarriesOneKind") {
  auto id = ContentId(mp::crypto::sha256({}));
  DirectMessage dm;
  dm.bid = Bid::create(id, 10, "EUR", {}, 1);
  auto back = DirectMessage::decode(dm.encode());
  REQUIRE(back.bid);
  CHECK_FALSE(back.chat);
  CHECK_EQ(*back.bid, *dm.bid);
  CHECK_THROWS_AS(DirectMessage::decode(mp::as_bytes(R"({"kind":"other"})")), mp::Error);
}

TEST_CASE("Chat.BookRecordsEntries") {
  mp::Digest self = mp::crypto::sha256(mp::as_bytes("self"));
  mp::Digest peer = mp::crypto::sha256(mp::as_bytes("peer"));
  auto id = ContentId(mp::crypto::sha256({}));
  ChatBook book(self);
  auto ch = book.open(peer, id);
  CHECK_EQ(ch, chat_channel_id(self, peer, id));
  CHECK_EQ(book.open(peer, id), ch);
  book.record(ch, ChatEntry{peer, "chat", "hi", std::nullopt, "", 3});
  auto got = book.get(ch);
  REQUIRE(got);
  REQUIRE_EQ(got->entries.size(), 1u);
  CHECK_EQ(got->entries[0].body, "hi");
  CHECK_EQ(book.channels().size(), 1u);
}
