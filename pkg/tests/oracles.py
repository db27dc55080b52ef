"""Independent reference implementations used to compute expected test values.

Everything here is deliberately written with a different structure from the
library code (plain loops, homogeneous matrices, heap-based event simulation)
so that agreement is meaningful.
"""

import hashlib
import heapq
import math

import numpy as np


# ---------------------------------------------------------------------------
# planar geometry: 3x3 homogeneous matrices

def pose_to_matrix(x, y, theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, x], [s, c, y], [0.0, 0.0, 1.0]])


def matrix_to_pose(m):
    return (m[0, 2], m[1, 2], math.atan2(m[1, 0], m[0, 0]))


def compose_via_matrix(a, b):
    """a, b are (x, y, theta) tuples."""
    return matrix_to_pose(pose_to_matrix(*a) @ pose_to_matrix(*b))


# ---------------------------------------------------------------------------
# endpointer: exhaustive window scan over a complete sample array

def endpoint_scan(samples, sample_rate, window_frames=5, epsilon=0.1, max_duration=15.0):
    """Stop time for a full recording, by scanning every window boundary.

    Frame 0 (first 200 ms) calibrates: tau is the mean RMS of its ten 20 ms
    sub-frames. Every later frame boundary with a full window of the last
    `window_frames` frames is checked against tau * (1 + epsilon).
    """
    frame = round(0.2 * sample_rate)
    sub = frame // 10
    n_frames = len(samples) // frame
    if n_frames < 1:
        return None

    def rms(a):
        total = 0.0
        for v in a:
            total += float(v) * float(v)
        return math.sqrt(total / len(a))

    cal = samples[0:frame]
    tau = sum(rms(cal[i * sub:(i + 1) * sub]) for i in range(10)) / 10.0

    frame_rms = [rms(samples[k * frame:(k + 1) * frame]) for k in range(1, n_frames)]
    for j in range(window_frames - 1, len(frame_rms)):
        t = (j + 2) * 0.2  # frame j covers [0.2*(j+1), 0.2*(j+2))
        if t > max_duration:
            return max_duration
        window = frame_rms[j - window_frames + 1: j + 1]
        if sum(window) / window_frames <= tau * (1.0 + epsilon):
            return t
    total_time = len(samples) / sample_rate
    if total_time >= max_duration:
        return max_duration
    return None


# ---------------------------------------------------------------------------
# streaming latency: heap-based discrete-event pipeline

def latency_event_queue(T, d, upload_rate, n, p, f, streaming):
    """Completion time via an explicit event simulation.

    Two serial resources (uplink, decoder) process chunk jobs in order; the
    recorder releases chunk i at the end of its recording interval.
    """
    if T <= 0:
        return f
    K = math.ceil(T / d)
    durations = [min(d, T - i * d) for i in range(K)]
    if streaming:
        ready = [min((i + 1) * d, T) for i in range(K)]
        jobs = [(ready[i], i) for i in range(K)]
    else:
        # whole file: one upload job carrying everything, ready when recording ends
        jobs = [(T, 0)]

    uplink_free = 0.0
    decoder_free = 0.0
    events = []
    for r, i in jobs:
        heapq.heappush(events, (r, 0, i))  # 0 = ready-for-upload
    done = 0.0
    while events:
        t, kind, i = heapq.heappop(events)
        if kind == 0:
            if streaming:
                wire = n + durations[i] / upload_rate
            else:
                wire = n + T / upload_rate
            start = max(t, uplink_free)
            uplink_free = start + wire
            heapq.heappush(events, (uplink_free, 1, i))
        else:
            if streaming:
                work = p
            else:
                work = K * p
            start = max(t, decoder_free)
            decoder_free = start + work
            done = decoder_free
    return done + f


# ---------------------------------------------------------------------------
# face detection: BFS flood fill over a thresholded image

def flood_fill_boxes(pixels, threshold=128, min_area=9):
    """Bounding boxes of 4-connected bright components, ordered by (y, x)."""
    h, w = pixels.shape
    seen = np.zeros((h, w), dtype=bool)
    boxes = []
    for y in range(h):
        for x in range(w):
            if seen[y, x] or pixels[y, x] < threshold:
                continue
            queue = [(y, x)]
            seen[y, x] = True
            ys, xs = [], []
            while queue:
                cy, cx = queue.pop()
                ys.append(cy)
                xs.append(cx)
                for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                    if 0 <= ny < h and 0 <= nx < w and not seen[ny, nx] and pixels[ny, nx] >= threshold:
                        seen[ny, nx] = True
                        queue.append((ny, nx))
            if len(ys) >= min_area:
                boxes.append((min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1))
    boxes.sort(key=lambda b: (b[1], b[0]))
    return boxes


def naive_embed(crop):
    """Nested-loop area resample to 16x16, standardize, unit-normalize."""
    h, w = crop.shape
    out = np.zeros((16, 16))
    for ty in range(16):
        for tx in range(16):
            y0, y1 = ty * h / 16.0, (ty + 1) * h / 16.0
            x0, x1 = tx * w / 16.0, (tx + 1) * w / 16.0
            total = 0.0
            area = 0.0
            for sy in range(int(math.floor(y0)), int(math.ceil(y1))):
                for sx in range(int(math.floor(x0)), int(math.ceil(x1))):
                    wy = min(sy + 1.0, y1) - max(float(sy), y0)
                    wx = min(sx + 1.0, x1) - max(float(sx), x0)
                    total += crop[sy, sx] * wy * wx
                    area += wy * wx
            out[ty, tx] = total / area
    flat = out.flatten()
    std = flat.std()
    if std < 1e-9:
        return np.zeros(256)
    v = (flat - flat.mean()) / std
    return v / np.linalg.norm(v)


def naive_cosine(a, b):
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


# ---------------------------------------------------------------------------
# depth pipeline: single-pass per-pixel projection to scan bins

def brute_force_scan(depths, fx, fy, cx, cy, height, pitch, angle_min, angle_max,
                     increment, range_min, range_max, h_min, h_max):
    """Per-pixel reimplementation of depth -> points -> heights -> bins."""
    n_bins = int(math.floor((angle_max - angle_min) / increment + 1e-9)) + 1
    ranges = [math.inf] * n_bins
    rows, cols = depths.shape
    sp, cp = math.sin(pitch), math.cos(pitch)
    for v in range(rows):
        for u in range(cols):
            z = depths[v, u]
            if not (z > 0) or not math.isfinite(z):
                continue
            xc = (u - cx) * z / fx
            yc = (v - cy) * z / fy
            # camera axes in the level sensor frame (x fwd, y left, z up)
            wx = xc * 0.0 + yc * (-sp) + z * cp
            wy = xc * (-1.0) + yc * 0.0 + z * 0.0
            wz = xc * 0.0 + yc * (-cp) + z * (-sp) + height
            if wz < h_min or wz > h_max:
                continue
            r = math.hypot(wx, wy)
            if r < range_min or r > range_max:
                continue
            phi = math.atan2(wy, wx)
            b = math.floor((phi - angle_min) / increment)
            if 0 <= b < n_bins and r < ranges[b]:
                ranges[b] = r
    return [None if math.isinf(r) else r for r in ranges]


# ---------------------------------------------------------------------------
# distance transform: O(cells * obstacles) nearest-obstacle scan

def brute_force_distances(occupied, resolution):
    """occupied: (h, w) bool array. Distance between cell centers, meters."""
    h, w = occupied.shape
    obs = [(y, x) for y in range(h) for x in range(w) if occupied[y, x]]
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            best = math.inf
            for oy, ox in obs:
                d2 = (oy - y) ** 2 + (ox - x) ** 2
                if d2 < best:
                    best = d2
            out[y, x] = math.sqrt(best) * resolution
    return out


# ---------------------------------------------------------------------------
# planning: independent Dijkstra and BFS

NEIGHBORS_8 = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]


def dijkstra_cost(costs, start, goal, penalty=5.0, lethal=255):
    """Minimum path weight on an 8-connected costmap; None when unreachable.

    costs: (h, w) integer array. Edge weight matches the planner's contract:
    move length in cells times (1 + mean endpoint cost / 253 * penalty).
    """
    h, w = costs.shape
    if costs[start[1], start[0]] >= lethal or costs[goal[1], goal[0]] >= lethal:
        return None
    dist = {start: 0.0}
    heap = [(0.0, start)]
    visited = set()
    while heap:
        d, cell = heapq.heappop(heap)
        if cell in visited:
            continue
        if cell == goal:
            return d
        visited.add(cell)
        x, y = cell
        for dx, dy in NEIGHBORS_8:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h):
                continue
            if costs[ny, nx] >= lethal:
                continue
            length = math.sqrt(2.0) if dx and dy else 1.0
            wgt = length * (1.0 + (float(costs[y, x]) + float(costs[ny, nx])) / 2.0 / 253.0 * penalty)
            nd = d + wgt
            if nd < dist.get((nx, ny), math.inf):
                dist[(nx, ny)] = nd
                heapq.heappush(heap, (nd, (nx, ny)))
    return None


def bfs_hops(costs, start, goal, lethal=255):
    """4-connected hop count ignoring cell costs; None when unreachable."""
    h, w = costs.shape
    from collections import deque
    q = deque([(start, 0)])
    seen = {start}
    while q:
        (x, y), hops = q.popleft()
        if (x, y) == goal:
            return hops
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h and (nx, ny) not in seen and costs[ny, nx] < lethal:
                seen.add((nx, ny))
                q.append(((nx, ny), hops + 1))
    return None


# ---------------------------------------------------------------------------
# collision: brute-force point-to-segment distance

def point_segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


# ---------------------------------------------------------------------------
# raycasting: fine-step marching

def fine_step_raycast(grid_cells, resolution, origin_xy, x, y, bearing, max_range, step=0.001):
    """March in tiny steps until an occupied cell; grid origin axis-aligned."""
    ox, oy = origin_xy
    c, s = math.cos(bearing), math.sin(bearing)
    h, w = grid_cells.shape
    r = 0.0
    while r <= max_range:
        px = x + r * c
        py = y + r * s
        ix = math.floor((px - ox) / resolution)
        iy = math.floor((py - oy) / resolution)
        if 0 <= ix < w and 0 <= iy < h and grid_cells[iy, ix] > 0.5:
            return r
        r += step
    return None


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
