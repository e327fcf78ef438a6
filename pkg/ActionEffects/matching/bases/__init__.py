from .basematcher import BaseMatcher
