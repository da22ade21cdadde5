"""
MANOVA, Levene-type tests and residual covariance
=================================================

Mean differences are tested with the four classical MANOVA criteria.  The
same machinery applied to absolute deviations from group medians gives a
robust test of dispersion differences.
"""

import numpy as np

from covhomog import builtin_dataset
from covhomog.mlm import DesignMatrix, levene_test, manova, residual_covariance

skulls = builtin_dataset("skulls")
print(manova(skulls).to_text())

# Brown-Forsythe flavour: deviations from each group's median
print(levene_test(skulls, center="median").to_text())

# covariance of residuals from a model with a covariate: here basibregmatic
# height is partialled out of the other three measurements
bh = skulls.values[:, 1]
rest = skulls.with_values(skulls.values[:, [0, 2, 3]], ["mb", "bl", "nh"])
X = DesignMatrix.from_groups(rest, covariates=bh, covariate_names=["bh"])
print("design columns:", X.column_names)
print(np.round(residual_covariance(rest, X), 3))
