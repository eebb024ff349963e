# Smoothing a jittered theta on discretized circles.
# The fine circle has 256 points; coarse circles of 8, 16, 32 points map into it.

# %%
from egh import BumpSpec, greedy_net, smooth_theta
from egh.fixtures import circle_embedding, circle_triple

# %%
N = 256
for n in (8, 16, 32):
    t = circle_triple(n, N, jitter=N // n // 4, seed=0)
    eps = float(t.order)
    net = greedy_net(t.source, 5 * eps)
    theta2, rep = smooth_theta(t, circle_embedding(t.target), net, BumpSpec(10 * eps))
    moved = float(rep["theta_distance"].measured)
    print(f"n={n:3d} eps={eps:.4f} net={len(net.centers):2d} "
          f"d(theta', theta)={moved:.4f} recertified={rep.extra['recertified']}")

# At n=8 the bump covers the whole coarse circle, so theta' is a blur of
# everything; the displacement shrinks as the coarse circle is refined.
