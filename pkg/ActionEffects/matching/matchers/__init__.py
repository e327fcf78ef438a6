from .replacement_matcher import ReplacementMatcher
from .greedy_matcher import GreedyMatcher
