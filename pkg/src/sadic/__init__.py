"""S-adic shifts: substitutions, dual maps on discrete planes, Rauzy fractal
clouds, coincidence certificates, Brun / Arnoux-Rauzy expansions, Lyapunov
exponents of substitution cocycles and natural codings of toral translations."""
from . import kernels
from .cf import (ar_expand, ar_substitutions, brun_expand, brun_frequency, brun_step,
                 brun_substitutions, brun_sigma_substitutions, relate_brun, sample_invariant)
from .coincidence import (CoincidenceWitness, geometric_coincidence_check,
                          geometric_finiteness_check, negative_strong_coincidence,
                          strong_coincidence, verify_witness)
from .directive import DirectiveSequence, limit_word_prefix, price_report
from .dynamics import natural_coding_check, recurrence_estimate, word_balance
from .fractal import LabeledCloud, covering_histogram, rauzy_cloud
from .geometry import Face, dual_image, dual_image_patch, hyperplane_patch, project
from .lyapunov import lyapunov_estimate, pisot_condition
from .words import Substitution, abelianize, compose, incidence

__version__ = "0.1.0"
BACKEND = kernels.BACKEND

__all__ = ['ar_expand', 'ar_substitutions', 'brun_expand', 'brun_frequency',
           'brun_step', 'brun_substitutions', 'brun_sigma_substitutions', 'relate_brun',
           'sample_invariant', 'CoincidenceWitness', 'geometric_coincidence_check',
           'geometric_finiteness_check', 'negative_strong_coincidence',
           'strong_coincidence', 'verify_witness', 'DirectiveSequence',
           'limit_word_prefix', 'price_report', 'natural_coding_check',
           'recurrence_estimate', 'word_balance', 'LabeledCloud', 'covering_histogram',
           'rauzy_cloud', 'Face', 'dual_image', 'dual_image_patch', 'hyperplane_patch',
           'project', 'lyapunov_estimate', 'pisot_condition', 'Substitution',
           'abelianize', 'compose', 'incidence', 'BACKEND', '__version__']
