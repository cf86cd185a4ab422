# kcurves: bounded-curvature plane curves, their classes and homotopies
