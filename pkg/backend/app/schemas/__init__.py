from app.schemas.diagram import *
from app.schemas.report import *
