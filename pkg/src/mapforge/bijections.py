"""Tree bijections for planar maps.

Two constructions are implemented on top of the half-edge maps of
wick_fatgraphs:

* blossom trees (4-valent, one black leaf per vertex) <-> two-leg 4-valent
  planar maps, by matching black leaves to white leaves around the tree
  contour and, inversely, by cutting border edges of the external face;
* well-labeled trees <-> rooted quadrangulations: distance labels, one new
  edge per face joining the two corners whose face-successor carries a
  label one less, then erasure of the old edges and the origin.  Tree
  labels are the distances minus one, so the root label is 0.

Trees are nested tuples; a uniform quadrangulation sampler (cycle lemma
plus label rejection) rounds the module off.
"""

import random
from itertools import combinations, product

from .wick_fatgraphs import CombinatorialMap, faces_and_genus

TREE_CAP = 8


class TooLarge(ValueError):
    pass


class NotBlossom(ValueError):
    pass


class NotTwoLeg(ValueError):
    pass


class NotQuadrangulation(ValueError):
    pass


class NotWellLabeled(ValueError):
    pass


# ---------------------------------------------------------------------------
# blossom trees: ("W",) white leaf, ("B",) black leaf,
# ("V", (c0, c1, c2)) inner 4-valent vertex seen from its parent


def blossom_charge(t):
    if t[0] == "W":
        return 1
    if t[0] == "B":
        return -1
    return sum(blossom_charge(c) for c in t[1])


def check_blossom(t):
    """Quartic blossom invariants: one black leaf per vertex and every
    subtree not reduced to a black leaf carries charge +1."""
    if t[0] == "B":
        raise NotBlossom("root slot cannot be a black leaf")

    def rec(node):
        if node[0] != "V":
            return
        children = node[1]
        if len(children) != 3:
            raise NotBlossom("inner vertices must be 4-valent")
        if sum(1 for c in children if c[0] == "B") != 1:
            raise NotBlossom("each vertex needs exactly one black leaf")
        for c in children:
            if c[0] == "V":
                if blossom_charge(c) != 1:
                    raise NotBlossom("subtree charge must be +1")
                rec(c)

    if blossom_charge(t) != 1:
        raise NotBlossom("total charge must be +1")
    rec(t)


def enumerate_blossom_trees(n_vertices):
    """All quartic blossom trees with the given number of inner vertices."""
    if n_vertices > TREE_CAP:
        raise TooLarge("blossom enumeration capped at %d vertices" % TREE_CAP)

    def charged(n):
        if n == 0:
            yield ("W",)
            return
        for pos in range(3):
            for n1 in range(n):
                for left in charged(n1):
                    for right in charged(n - 1 - n1):
                        kids = [None, None, None]
                        kids[pos] = ("B",)
                        rest = iter((left, right))
                        for i in range(3):
                            if kids[i] is None:
                                kids[i] = next(rest)
                        yield ("V", tuple(kids))

    yield from charged(n_vertices)


def enumerate_even_blossom_trees(valences, n_vertices):
    """General even case: a 2k-valent vertex carries k-1 black leaves among
    its 2k-1 descendant slots, the rest being charge +1 subtrees."""
    if n_vertices > TREE_CAP:
        raise TooLarge("blossom enumeration capped at %d vertices" % TREE_CAP)
    for v in valences:
        if v % 2 or v < 4:
            raise NotBlossom("valences must be even and >= 4")
    ks = sorted(set(v // 2 for v in valences))
    cache = {}

    def charged(n):
        if n not in cache:
            cache[n] = list(gen(n))
        return cache[n]

    def gen(n):
        if n == 0:
            yield ("W",)
            return
        for k in ks:
            slots = 2 * k - 1
            for mask in combinations(range(slots), k - 1):
                open_slots = [i for i in range(slots) if i not in mask]
                for parts in _compositions(n - 1, len(open_slots)):
                    for subs in product(*(charged(m) for m in parts)):
                        kids = [("B",)] * slots
                        for slot, sub in zip(open_slots, subs):
                            kids[slot] = sub
                        yield ("V", tuple(kids))

    yield from charged(n_vertices)


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _match_cyclic(colors):
    """Match each black leaf with the next unmatched white leaf in cyclic
    order; returns (pairs, index of the lone white leaf)."""
    n = len(colors)
    partner = [None] * n
    pairs = []
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if colors[i] != "B" or partner[i] is not None:
                continue
            j = (i + 1) % n
            while j != i and partner[j] is not None:
                j = (j + 1) % n
            if j != i and colors[j] == "W":
                partner[i], partner[j] = j, i
                pairs.append((i, j))
                changed = True
    lone = [i for i in range(n) if colors[i] == "W" and partner[i] is None]
    unmatched_black = any(colors[i] == "B" and partner[i] is None
                          for i in range(n))
    if len(lone) != 1 or unmatched_black:
        raise NotBlossom("leaf matching failed")
    return pairs, lone[0]


def blossom_close(t):
    """Blossom tree -> two-leg 4-valent planar map (root dart on out-leg)."""
    check_blossom(t)
    sigma_cycles = []
    alpha_pairs = []
    counter = [0]

    def new_dart():
        counter[0] += 1
        return counter[0] - 1

    leaf_darts = []
    leaf_colors = []

    def build(node, parent_dart):
        if node[0] in ("W", "B"):
            leaf_darts.append(parent_dart)
            leaf_colors.append(node[0])
            return
        top = new_dart()
        kid_darts = [new_dart() for _ in node[1]]
        sigma_cycles.append([top] + kid_darts)
        alpha_pairs.append((parent_dart, top))
        for kd, child in zip(kid_darts, node[1]):
            build(child, kd)

    root_dart = new_dart()
    sigma_cycles.append([root_dart])
    build(t, root_dart)
    # build records leaves in contour order starting from the root slot
    pairs, lone = _match_cyclic(leaf_colors)
    for i, j in pairs:
        alpha_pairs.append((leaf_darts[i], leaf_darts[j]))
    in_dart = new_dart()
    sigma_cycles.append([in_dart])
    alpha_pairs.append((leaf_darts[lone], in_dart))
    n = counter[0]
    sigma = [0] * n
    for cyc in sigma_cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            sigma[a] = b
    alpha = [0] * n
    for a, b in alpha_pairs:
        alpha[a], alpha[b] = b, a
    m = CombinatorialMap(sigma, alpha, root=root_dart)
    check_two_leg(m)
    return m


def check_two_leg(m):
    """Planar connected map, two univalent legs with the root dart on one
    of them, all other vertices 4-valent."""
    if len(m.components()) != 1:
        raise NotTwoLeg("map not connected")
    _, _, _, genera = faces_and_genus(m)
    if genera != [0]:
        raise NotTwoLeg("map not planar")
    legs = [v for v in m.vertices() if len(v) == 1]
    if len(legs) != 2:
        raise NotTwoLeg("need exactly two univalent legs")
    if not any(m.root in v for v in legs):
        raise NotTwoLeg("root dart must sit on a leg")
    for v in m.vertices():
        if len(v) not in (1, 4):
            raise NotTwoLeg("inner vertices must be 4-valent")


def blossom_cut(m):
    """Two-leg map -> blossom tree; inverse of blossom_close.

    Walks the external face (the one at the in-leg) in the face orientation,
    cutting every non-bridge edge into a black stub (side met first) and a
    white stub, until only a tree remains."""
    check_two_leg(m)
    sigma = list(m.sigma)
    alpha = list(m.alpha)
    root_dart = m.root
    legs = [v[0] for v in m.vertices() if len(v) == 1]
    in_dart = [d for d in legs if d != root_dart][0]
    color = {}
    leg_like = {in_dart, root_dart}

    def is_bridge(d):
        e = alpha[d]
        seen = {d}
        stack = [d]
        while stack:
            x = stack.pop()
            nbrs = [sigma[x]]
            if x != d and x != e:
                nbrs.append(alpha[x])
            for y in nbrs:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return e not in seen

    def cut(d):
        e = alpha[d]
        x, y = len(sigma), len(sigma) + 1
        sigma.extend([x, y])
        alpha[d] = x
        alpha.append(d)
        alpha[e] = y
        alpha.append(e)
        color[x] = "B"
        color[y] = "W"

    def cuttable(d):
        e = alpha[d]
        if d in color or e in color or d in leg_like or e in leg_like:
            return False
        return not is_bridge(d)

    def external_face():
        face = [in_dart]
        d = sigma[alpha[in_dart]]
        while d != in_dart:
            face.append(d)
            d = sigma[alpha[d]]
        return face

    # pass by pass: only edges bordering the external face at the start of
    # the pass are candidates; each cut merges the adjacent face in
    while True:
        any_cut = False
        for d in external_face():
            if cuttable(d):
                cut(d)
                any_cut = True
        if not any_cut:
            break

    def node_from(d):
        # d points along a surviving edge toward the node being built
        e = alpha[d]
        if e in color:
            return (color[e],)
        if e == in_dart:
            return ("W",)
        kids = []
        x = sigma[e]
        while x != e:
            kids.append(node_from(x))
            x = sigma[x]
        return ("V", tuple(kids))

    t = node_from(root_dart)
    check_blossom(t)
    return t


def canonical_form(m):
    """Canonical dart relabeling of a rooted connected map; a complete
    isomorphism invariant."""
    order = {m.root: 0}
    queue = [m.root]
    head = 0
    while head < len(queue):
        d = queue[head]
        head += 1
        for e in (m.sigma[d], m.alpha[d]):
            if e not in order:
                order[e] = len(order)
                queue.append(e)
    n = m.n_darts
    sigma = [0] * n
    alpha = [0] * n
    for d in range(n):
        sigma[order[d]] = order[m.sigma[d]]
        alpha[order[d]] = order[m.alpha[d]]
    return (tuple(sigma), tuple(alpha))


# ---------------------------------------------------------------------------
# well-labeled trees: nested (label, (children...))


def check_well_labeled(t, root_label=0):
    if t[0] != root_label:
        raise NotWellLabeled("root label must be %d" % root_label)

    def rec(node):
        lab, kids = node
        if lab < 0:
            raise NotWellLabeled("labels must be non-negative")
        for c in kids:
            if abs(c[0] - lab) > 1:
                raise NotWellLabeled("adjacent labels must differ by <= 1")
            rec(c)

    rec(t)


def tree_edges(t):
    return sum(1 + tree_edges(c) for c in t[1])


def enumerate_well_labeled(n_edges, root_label=0):
    """All well-labeled trees with the given number of edges."""
    if n_edges > TREE_CAP:
        raise TooLarge("tree enumeration capped at %d edges" % TREE_CAP)

    def forests(budget, root_lab):
        if budget == 0:
            yield ()
            return
        for first_edges in range(1, budget + 1):
            for lab in (root_lab - 1, root_lab, root_lab + 1):
                if lab < 0:
                    continue
                for sub in forests(first_edges - 1, lab):
                    for rest in forests(budget - first_edges, root_lab):
                        yield ((lab, sub),) + rest

    for kids in forests(n_edges, root_label):
        yield (root_label, kids)


# ---------------------------------------------------------------------------
# CVS bijection: rooted quadrangulations <-> well-labeled trees


def _vertex_data(m):
    verts = m.vertices()
    vertex_of = {}
    for i, v in enumerate(verts):
        for d in v:
            vertex_of[d] = i
    return verts, vertex_of


def _bfs_distances(m, verts, vertex_of, origin):
    dist = [None] * len(verts)
    dist[origin] = 0
    queue = [origin]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for d in verts[v]:
            w = vertex_of[m.alpha[d]]
            if dist[w] is None:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def check_quadrangulation(m):
    if m.root is None:
        raise NotQuadrangulation("a root dart is required")
    if len(m.components()) != 1:
        raise NotQuadrangulation("map not connected")
    _, _, _, genera = faces_and_genus(m)
    if genera != [0]:
        raise NotQuadrangulation("map not planar")
    for f in m.faces():
        if len(f) != 4:
            raise NotQuadrangulation("all faces must have degree 4")
    verts, vertex_of = _vertex_data(m)
    dist = _bfs_distances(m, verts, vertex_of, vertex_of[m.root])
    for d in range(m.n_darts):
        if dist[vertex_of[d]] == dist[vertex_of[m.alpha[d]]]:
            raise NotQuadrangulation("quadrangulations are bipartite")
    return verts, vertex_of, dist


def cvs_forward(m):
    """Rooted quadrangulation -> well-labeled tree (root label 0)."""
    verts, vertex_of, dist = check_quadrangulation(m)
    # one new edge per face, joining the two corners preceded around the
    # face by a corner with a label one less
    anchor = {}
    for face in m.faces():
        marked = []
        for i, d in enumerate(face):
            nd = face[(i - 1) % len(face)]
            if dist[vertex_of[nd]] == dist[vertex_of[d]] - 1:
                marked.append(d)
        if len(marked) != 2:
            raise NotQuadrangulation("face with a bad label pattern")
        a, b = marked
        anchor[a] = b
        anchor[b] = a
    root_vertex = vertex_of[m.alpha[m.root]]
    visited = set()

    def subtree(b):
        # b anchors the tree edge at the child vertex; the children follow
        # in rotation order
        v = vertex_of[b]
        if v in visited:
            raise NotQuadrangulation("new edges do not form a tree")
        visited.add(v)
        kids = []
        d = m.sigma[b]
        while d != b:
            if d in anchor:
                kids.append(subtree(anchor[d]))
            d = m.sigma[d]
        return (dist[v] - 1, tuple(kids))

    visited.add(root_vertex)
    kids = []
    d = m.sigma[m.alpha[m.root]]
    for _ in range(len(verts[root_vertex])):
        if d in anchor:
            kids.append(subtree(anchor[d]))
        d = m.sigma[d]
    t = (dist[root_vertex] - 1, tuple(kids))
    check_well_labeled(t)
    if tree_edges(t) != len(m.faces()):
        raise NotQuadrangulation("tree edge count differs from face count")
    return t


def _contour_corners(t):
    """Corners in contour order as (vertex id, tree label); ids follow the
    preorder walk with the root as 0, and the root corner comes first."""
    corners = []
    next_id = [1]

    def walk(node, nid, is_root):
        lab, kids = node
        for c in kids:
            corners.append((nid, lab))
            cid = next_id[0]
            next_id[0] += 1
            walk(c, cid, False)
        if not is_root:
            corners.append((nid, lab))

    walk(t, 0, True)
    if not t[1]:
        corners.append((0, t[0]))
    return corners


def _quad_from_corner_labels(corners, lab, root):
    """Chord construction shared by cvs_inverse and the pointed sampler.

    Every corner gets a chord to the next corner around the contour whose
    label is one less; minimum-label corners (label 1 after shifting) chord
    to an added origin vertex.  The chords alone form the quadrangulation.
    """
    n = len(corners)
    succ = [None] * n
    last = {}
    for _ in range(2):
        for i in range(n - 1, -1, -1):
            succ[i] = last.get(lab[i] - 1, succ[i])
            last[lab[i]] = i
    # darts: 2i leaves corner i, its partner 2i+1 lands on the successor
    alpha = []
    for i in range(n):
        alpha.extend([2 * i + 1, 2 * i])
    incoming = {i: [] for i in range(n)}
    to_origin = []
    for i in range(n):
        if lab[i] == 1:
            to_origin.append(i)
        elif succ[i] is None:
            raise NotWellLabeled("corner with no successor")
        else:
            incoming[succ[i]].append(i)
    # chords into a corner nest without crossing: rotating across the
    # corner we meet the nearest source first and the outgoing dart last
    for j in range(n):
        incoming[j].sort(key=lambda i: (j - i) % n)
    by_vertex = {}
    for i, (nid, _) in enumerate(corners):
        by_vertex.setdefault(nid, []).append(i)
    sigma = [0] * (2 * n)
    for idxs in by_vertex.values():
        cyc = []
        for i in idxs:
            cyc.extend(2 * src + 1 for src in incoming[i])
            cyc.append(2 * i)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            sigma[a] = b
    # the origin sees the minimum-label corners in reversed contour order
    cyc = [2 * i + 1 for i in reversed(to_origin)]
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        sigma[a] = b
    return CombinatorialMap(sigma, alpha, root=root), cyc[0]


def cvs_inverse(t):
    """Well-labeled tree (root label 0) -> rooted quadrangulation, rooted
    on the origin side of the root corner's chord."""
    check_well_labeled(t)
    corners = _contour_corners(t)
    lab = [c[1] + 1 for c in corners]
    m, _ = _quad_from_corner_labels(corners, lab, root=1)
    check_quadrangulation(m)
    return m


def pointed_quadrangulation(t, eps):
    """Free-labeled tree (root label 0, increments in {-1,0,+1}) plus a
    sign -> (rooted quadrangulation, dart at the marked vertex).

    Labels are shifted so their minimum becomes 1 before applying the chord
    rule; the marked vertex is the added origin, and the root edge is the
    root corner's chord, oriented by eps.  With the tree, the labels and
    the sign all uniform, forgetting the marked vertex leaves the uniform
    distribution on rooted quadrangulations."""
    corners = _contour_corners(t)
    shift = 1 - min(c[1] for c in corners)
    lab = [c[1] + shift for c in corners]
    return _quad_from_corner_labels(corners, lab, root=0 if eps > 0 else 1)


def enumerate_quadrangulations(n_faces):
    """All rooted quadrangulations with n_faces faces, via the trees."""
    seen = set()
    out = []
    for t in enumerate_well_labeled(n_faces):
        m = cvs_inverse(t)
        key = canonical_form(m)
        if key in seen:
            raise NotQuadrangulation("tree collision; bijection broken")
        seen.add(key)
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# uniform sampling


def _rng(seed, index):
    # counter-based stream: an independent generator per sample index
    return random.Random("mapforge:%d:%d" % (seed, index))


def random_plane_tree(A, rng):
    """Uniform plane tree with A edges via the cycle lemma."""
    steps = [1] * A + [-1] * (A + 1)
    rng.shuffle(steps)
    total = 0
    best = (1, 0)
    for i, s in enumerate(steps):
        total += s
        if total < best[0]:
            best = (total, i + 1)
    start = best[1] % len(steps)
    path = steps[start:] + steps[:start]
    # the rotated path stays >= 0 until its final down step; drop it
    path = path[:-1]
    pos = [0]

    def parse():
        kids = []
        while pos[0] < len(path) and path[pos[0]] == 1:
            pos[0] += 1
            kids.append(parse())
            pos[0] += 1
        return tuple(kids)

    return parse()


def _label_shape(shape, rng):
    """Root label 0 and iid uniform {-1,0,+1} edge increments; None as soon
    as a label would go negative."""

    def rec(sh, lab):
        kids = []
        for c in sh:
            nl = lab + rng.choice((-1, 0, 1))
            if nl < 0:
                return None
            sub = rec(c, nl)
            if sub is None:
                return None
            kids.append(sub)
        return (lab, tuple(kids))

    return rec(shape, 0)


def sample_well_labeled_tree(A, seed, index=0):
    """Uniform well-labeled tree with A edges; returns (tree, proposals)."""
    rng = _rng(seed, index)
    tries = 0
    while True:
        tries += 1
        t = _label_shape(random_plane_tree(A, rng), rng)
        if t is not None:
            return t, tries


def sample_quadrangulation(A, seed, index=0):
    """Uniform rooted quadrangulation with A faces by label rejection;
    the acceptance rate is 2/(A+2), so prefer the uniform pointed route
    for large A."""
    t, _ = sample_well_labeled_tree(A, seed, index)
    return cvs_inverse(t)


def _free_label_shape(shape, rng):
    """Root label 0 and iid uniform {-1,0,+1} increments, unconstrained."""

    def rec(sh, lab):
        return (lab, tuple(rec(c, lab + rng.choice((-1, 0, 1)))
                           for c in sh))

    return rec(shape, 0)


def sample_quadrangulation_uniform(A, seed, index=0):
    """Uniform rooted quadrangulation with A faces, without rejection.

    Samples a uniform (plane tree, free labels, sign) triple and forgets
    the marked vertex of the pointed construction; since every rooted
    quadrangulation corresponds to exactly 2(A+2) such triples, the result
    is exactly uniform."""
    rng = _rng(seed, index)
    shape = random_plane_tree(A, rng)
    t = _free_label_shape(shape, rng)
    eps = rng.choice((1, -1))
    m, _ = pointed_quadrangulation(t, eps)
    return m


def distance_profile(m):
    """(counts of vertices per distance from the root start, degree of the
    root start vertex)."""
    verts, vertex_of = _vertex_data(m)
    origin = vertex_of[m.root]
    dist = _bfs_distances(m, verts, vertex_of, origin)
    counts = {}
    for x in dist:
        counts[x] = counts.get(x, 0) + 1
    return counts, len(verts[origin])


def acceptance_stats(A, seed, proposals):
    """Number of accepted proposals; the exact rate is 2/(A+2)."""
    rng = _rng(seed, 0)
    ok = 0
    for _ in range(proposals):
        if _label_shape(random_plane_tree(A, rng), rng) is not None:
            ok += 1
    return ok


def tree_label_profile(t):
    """Vertex counts per label; label n-1 means distance n in the map."""
    out = {}

    def rec(node):
        out[node[0]] = out.get(node[0], 0) + 1
        for c in node[1]:
            rec(c)

    rec(t)
    return out


def tree_degree_of_origin(t):
    """Degree of the origin in the quadrangulation: the number of corners
    at label-0 vertices of the tree."""
    acc = [0]

    def rec(node, has_parent):
        if node[0] == 0:
            acc[0] += len(node[1]) + (1 if has_parent else 0)
        for c in node[1]:
            rec(c, True)

    rec(t, False)
    return acc[0]
