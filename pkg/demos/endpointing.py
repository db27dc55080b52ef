"""Speech endpointing walkthrough.

Builds a synthetic recording (room tone, speech burst, silence), then shows
the calibrated threshold and the sliding-window decision against it.
"""

import numpy as np

from greeterbot.endpointer import AudioChunk, Endpointer

RATE = 16000


def tone(duration, amplitude):
    seg = np.full(round(duration * RATE), amplitude, dtype=np.int16)
    seg[1::2] *= -1
    return seg


recording = np.concatenate([
    tone(0.2, 15),     # room tone the robot calibrates on
    tone(1.8, 300),    # the user speaking
    tone(0.6, 90),     # trailing off
    tone(2.0, 15),     # silence again
])

ep = Endpointer()
stop = ep.feed(AudioChunk(recording, RATE))

print(f"silence threshold tau = {ep.threshold.tau_s:.1f}")
print(f"stop level (tau * 1.1) = {ep.threshold.stop_level:.1f}")
print()
print("frame  t_end  rms")
for frame in ep.frames:
    t_end = 0.2 * (frame.index + 1)
    bar = "#" * min(60, int(frame.rms / 6))
    print(f"{frame.index:>5}  {t_end:4.1f}s  {frame.rms:7.1f} {bar}")
print()
print(f"speech ends at t = {stop} s")
print(f"trimmed recording keeps {round(stop * RATE)} of {len(recording)} samples")
