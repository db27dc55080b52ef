"""Enroll, query, decide: the trusted-user gallery in five steps."""

from greeterbot.faces import Gallery
from greeterbot.orchestrator.personas import crowd_image, face_image

gallery = Gallery()

print("enrolling alice and bob from their synthetic captures")
alice_id = gallery.enroll(face_image("alice"), "alice")
bob_id = gallery.enroll(face_image("bob"), "bob")
print(f"  gallery now holds {len(gallery)} entries: {alice_id}, {bob_id}")

print("\nalice walks up alone")
confidences = gallery.query(face_image("alice"))
for entry in gallery.entries():
    print(f"  {entry.label:<6} confidence {confidences[entry.entry_id]:.3f}")
print(f"  decision at threshold 0.8: {gallery.decide(confidences, 0.8)}")

print("\na stranger walks up")
confidences = gallery.query(face_image("mallory"))
for entry in gallery.entries():
    print(f"  {entry.label:<6} confidence {confidences[entry.entry_id]:.3f}")
print(f"  decision at threshold 0.8: {gallery.decide(confidences, 0.8)}")

print("\nalice in a crowd (her face is biggest, so she is the subject)")
confidences = gallery.query(crowd_image(["alice", "bob", "mallory"]))
print(f"  decision: {gallery.decide(confidences, 0.8)}")
