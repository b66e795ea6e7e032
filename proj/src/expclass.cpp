namespace bergman {}
